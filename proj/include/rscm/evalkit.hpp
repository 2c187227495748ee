#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "rscm/qa.hpp"

namespace rscm {

struct Prediction {
  std::string triple_id;
  std::string answer;
};

/// One {"answer": ..., "triple_id": ...} object per line.
std::vector<Prediction> read_predictions(const std::filesystem::path& path);
void write_predictions(const std::vector<Prediction>& preds, const std::filesystem::path& path);

struct ScorePolicy {
  /// Missing or unknown predictions become errors instead of counted misses.
  bool strict = false;
};

struct QidScore {
  std::size_t correct = 0;
  std::size_t total = 0;
  double accuracy = 0.0;  // percent
};

/// Rows follow `labels` (gold answers); the last column counts predictions that
/// are missing or fall outside the labels.
struct ConfusionMatrix {
  std::vector<std::string> labels;
  std::vector<std::vector<std::size_t>> counts;

  std::size_t total() const;
  std::size_t row_sum(std::size_t row) const;
};

inline constexpr std::string_view kOtherColumn = "<other/missing>";

struct MetricsReport {
  double oa = 0.0;  // percent
  double aa = 0.0;  // percent, unweighted mean over qids
  std::map<int, QidScore> per_qid;
  std::map<int, ConfusionMatrix> confusion;
  std::size_t unmatched_predictions = 0;
  std::size_t missing_predictions = 0;
  /// sha256 of the canonical gold serialization; reports are comparable only on equal bases.
  std::string gold_checksum;
};

/// Trim ASCII whitespace and lower-case.
std::string normalize_answer(std::string_view answer);

/// Fingerprint of a gold set independent of line order.
std::string gold_checksum(const std::vector<Triple>& gold);

/// Throws EmptyGold, DuplicateTripleId, and under strict policy UnknownTripleId /
/// MissingPrediction. `registry`, when given, fixes confusion-matrix labels to
/// each qid's answer domain; otherwise the sorted distinct gold answers are used.
MetricsReport score(const std::vector<Triple>& gold, const std::vector<Prediction>& preds,
                    const ScorePolicy& policy = {}, const Registry* registry = nullptr);

/// Throws UnknownQid when no gold triple has this qid.
ConfusionMatrix confusion(const std::vector<Triple>& gold, const std::vector<Prediction>& preds,
                          int qid, const Registry* registry = nullptr);

double round2(double percent);

nlohmann::json to_json(const MetricsReport& report);
MetricsReport report_from_json(const nlohmann::json& doc);
/// qid,correct,total,accuracy rows followed by OA and AA rows.
std::string to_csv(const MetricsReport& report);

struct DeltaRow {
  std::string key;  // "OA", "AA" or "Q<n>"
  double a = 0.0;
  double b = 0.0;
  double delta = 0.0;  // b - a
  std::string marked;  // "+1.25", "-0.50", "0.00"
};

/// Throws BasisMismatch when the gold checksums differ.
std::vector<DeltaRow> compare_reports(const MetricsReport& a, const MetricsReport& b);

}  // namespace rscm
