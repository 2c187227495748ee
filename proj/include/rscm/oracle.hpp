#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "json.hpp"
#include "rscm/dataset_io.hpp"
#include "rscm/qa.hpp"

namespace rscm::oracle {

// Rule identifiers reported in violations and warnings.
inline constexpr std::string_view kMaskNotBinary = "mask_not_binary";
inline constexpr std::string_view kDiffOutsideMask = "diff_outside_mask";
inline constexpr std::string_view kDegeneratePaste = "degenerate_paste";
inline constexpr std::string_view kOverlapExceeded = "overlap_exceeded";
inline constexpr std::string_view kAreaOutOfBounds = "area_out_of_bounds";
inline constexpr std::string_view kBorderContact = "border_contact";
inline constexpr std::string_view kSourceFragmented = "source_fragmented";
inline constexpr std::string_view kBlurMaskMismatch = "blur_mask_mismatch";
inline constexpr std::string_view kEmptyMask = "empty_mask";
inline constexpr std::string_view kUntamperedModified = "untampered_modified";
inline constexpr std::string_view kDimensionMismatch = "dimension_mismatch";
inline constexpr std::string_view kMissingFile = "missing_file";
inline constexpr std::string_view kUnreadableFile = "unreadable_file";
inline constexpr std::string_view kChecksumMismatch = "checksum_mismatch";
inline constexpr std::string_view kAnswerMismatch = "answer_mismatch";
inline constexpr std::string_view kMissingTriple = "missing_triple";
inline constexpr std::string_view kUnexpectedTriple = "unexpected_triple";
inline constexpr std::string_view kDuplicateId = "duplicate_id";
inline constexpr std::string_view kAnswerOutOfDomain = "answer_out_of_domain";
inline constexpr std::string_view kOrphanTriple = "orphan_triple";
inline constexpr std::string_view kTripleCount = "triple_count";
inline constexpr std::string_view kSplitPartition = "split_partition";
inline constexpr std::string_view kSplitLeak = "split_leak";
inline constexpr std::string_view kBalanceTolerance = "balance_tolerance";
inline constexpr std::string_view kBalanceNotSubset = "balance_not_subset";
inline constexpr std::string_view kUnverifiable = "unverifiable";

struct Finding {
  std::string item_id;
  std::string rule_id;
  std::string detail;
};

struct VerificationReport {
  std::size_t items_checked = 0;
  std::vector<Finding> violations;
  std::vector<Finding> warnings;

  bool pass() const noexcept { return violations.empty(); }
  bool has_violation(std::string_view rule_id) const;
  void merge(VerificationReport other);
};

nlohmann::json to_json(const VerificationReport& report);

/// Generation constraints the item checks enforce.
struct Rules {
  double max_overlap = 0.05;
  double min_area_ratio = 0.001;
  double max_area_ratio = 0.15;
};

/// Pixel-level contract checks for one item, read from files under `root`.
VerificationReport verify_item(const ItemEntry& entry, const std::filesystem::path& root,
                               const Rules& rules = {});

struct Mismatch {
  std::string item_id;
  std::string triple_id;
  int qid = 0;
  std::string rule_id;  // answer_mismatch, missing_triple, unexpected_triple
  std::string expected;
  std::string stored;
};

struct RecomputeResult {
  std::vector<Mismatch> mismatches;
  /// qids whose answers depend on transform parameters the entry does not store.
  std::vector<int> unverifiable;
};

/// Re-derives every answer of one item from its mask files (naive scans) and
/// its manifest entry, and compares with the stored triples of that item.
RecomputeResult recompute_answers(const ItemEntry& entry, const std::vector<Triple>& item_triples,
                                  const Registry& registry, const std::filesystem::path& root);

struct DatasetOptions {
  /// Escalate warnings to violations.
  bool strict = false;
};

/// Checksums, per-item checks, answer recomputation, triple-file integrity,
/// split partition and (when recorded) balance tolerance.
VerificationReport verify_dataset(const std::filesystem::path& root, const DatasetOptions& options = {});

}  // namespace rscm::oracle
