#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "json.hpp"
#include "rscm/qa.hpp"
#include "rscm/rng.hpp"

namespace rscm {

enum class Split { train, val, test };
std::string_view to_string(Split split);

struct SplitRatios {
  double train = 0.70;
  double val = 0.15;
  double test = 0.15;
};

struct SplitAssignment {
  /// Raw (pre-tamper) image id to split.
  std::map<std::string, Split> groups;
  SplitRatios ratios;
  std::uint64_t seed = 0;

  std::array<std::size_t, 3> counts() const;
};

/// Largest-remainder apportionment of n units; exact ties in the remainder are
/// ordered by the random stream.
std::array<std::size_t, 3> apportion(std::size_t n, const SplitRatios& ratios, Rng& rng);

/// Group-level split. Duplicate ids are collapsed. Throws EmptyInput.
SplitAssignment split(std::vector<std::string> group_ids, const SplitRatios& ratios,
                      std::uint64_t seed);

struct BalanceSpec {
  double tolerance = 0.02;
  std::uint64_t seed = 0;
  /// Upper bound on the common per-qid count; the realised target may be lower.
  std::optional<std::size_t> per_qid_target;
};

struct BalanceResult {
  std::vector<Triple> triples;
  std::size_t per_qid_target = 0;
};

/// Down-samples every qid to a common count T using inverse answer-frequency
/// weights without replacement, with at most ceil(T/|answers|)*(1+tolerance)
/// triples per answer. `required_qids` (when non-empty) must all be present,
/// else MissingQid. Output preserves input order.
BalanceResult balance(const std::vector<Triple>& triples, const BalanceSpec& spec,
                      std::span<const int> required_qids = {});

struct DistributionReport {
  std::size_t total = 0;
  std::map<int, std::size_t> per_qid;
  std::map<int, std::map<std::string, std::size_t>> per_answer;
  std::map<QuestionCategory, std::size_t> per_category;

  /// max/min qid count minus one; 0 when empty.
  double qid_deviation() const;
  double category_share(QuestionCategory category) const;
};

DistributionReport distribution_report(const std::vector<Triple>& triples);
nlohmann::json to_json(const DistributionReport& report);

/// Pearson statistic of answer counts against a uniform split over the observed answers.
double chi_square(const std::map<std::string, std::size_t>& counts);

}  // namespace rscm
