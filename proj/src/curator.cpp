#include "rscm/curator.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>

namespace rscm {

std::string_view to_string(Split split) {
  switch (split) {
    case Split::train: return "train";
    case Split::val: return "val";
    case Split::test: return "test";
  }
  return "unknown";
}

std::array<std::size_t, 3> SplitAssignment::counts() const {
  std::array<std::size_t, 3> c{};
  for (const auto& [id, s] : groups) ++c[static_cast<int>(s)];
  return c;
}

std::array<std::size_t, 3> apportion(std::size_t n, const SplitRatios& ratios, Rng& rng) {
  const std::array<double, 3> r = {ratios.train, ratios.val, ratios.test};
  const double total = r[0] + r[1] + r[2];
  if (std::any_of(r.begin(), r.end(), [](double v) { return v < 0.0; }) ||
      std::abs(total - 1.0) > 1e-9) {
    throw Error(Errc::config_error, "split ratios must be non-negative and sum to 1");
  }
  std::array<std::size_t, 3> counts{};
  std::array<double, 3> remainder{};
  std::size_t assigned = 0;
  for (int i = 0; i < 3; ++i) {
    double quota = static_cast<double>(n) * r[i];
    if (std::abs(quota - std::round(quota)) < 1e-9) quota = std::round(quota);
    counts[i] = static_cast<std::size_t>(std::floor(quota));
    remainder[i] = quota - std::floor(quota);
    assigned += counts[i];
  }
  std::array<int, 3> order = {0, 1, 2};
  std::array<std::uint64_t, 3> tie{rng.next(), rng.next(), rng.next()};
  std::sort(order.begin(), order.end(), [&](int a, int b) {
    if (std::abs(remainder[a] - remainder[b]) > 1e-9) return remainder[a] > remainder[b];
    return tie[a] < tie[b];
  });
  for (std::size_t k = 0; assigned < n; ++k, ++assigned) ++counts[order[k % 3]];
  return counts;
}

SplitAssignment split(std::vector<std::string> group_ids, const SplitRatios& ratios,
                      std::uint64_t seed) {
  std::sort(group_ids.begin(), group_ids.end());
  group_ids.erase(std::unique(group_ids.begin(), group_ids.end()), group_ids.end());
  if (group_ids.empty()) throw Error(Errc::empty_input, "split: no groups");

  Rng rng(derive_seed(seed, {"split"}));
  const auto counts = apportion(group_ids.size(), ratios, rng);
  rng.shuffle(group_ids);

  SplitAssignment out;
  out.ratios = ratios;
  out.seed = seed;
  std::size_t i = 0;
  for (int s = 0; s < 3; ++s) {
    for (std::size_t k = 0; k < counts[s]; ++k, ++i) {
      out.groups.emplace(group_ids[i], static_cast<Split>(s));
    }
  }
  return out;
}

namespace {

struct QidPool {
  std::vector<std::size_t> indices;  // into the input, sorted by triple_id
  std::map<std::string, std::size_t> answer_counts;
};

std::size_t answer_cap(std::size_t target, std::size_t answers, double tolerance) {
  const double base = std::ceil(static_cast<double>(target) / static_cast<double>(answers));
  return static_cast<std::size_t>(std::floor(base * (1.0 + tolerance) + 1e-9));
}

std::size_t capacity(const QidPool& pool, std::size_t target, double tolerance) {
  const std::size_t cap = answer_cap(target, pool.answer_counts.size(), tolerance);
  std::size_t total = 0;
  for (const auto& [answer, n] : pool.answer_counts) total += std::min(n, cap);
  return total;
}

}  // namespace

BalanceResult balance(const std::vector<Triple>& triples, const BalanceSpec& spec,
                      std::span<const int> required_qids) {
  if (!(spec.tolerance > 0.0)) throw Error(Errc::config_error, "balance tolerance must be positive");
  std::map<int, QidPool> pools;
  for (std::size_t i = 0; i < triples.size(); ++i) {
    auto& pool = pools[triples[i].qid];
    pool.indices.push_back(i);
    ++pool.answer_counts[triples[i].answer];
  }
  for (int qid : required_qids) {
    if (!pools.contains(qid)) throw Error(Errc::missing_qid, "qid " + std::to_string(qid) + " has no triples");
  }
  if (pools.empty()) throw Error(Errc::missing_qid, "no triples to balance");

  std::size_t target = std::numeric_limits<std::size_t>::max();
  for (const auto& [qid, pool] : pools) target = std::min(target, pool.indices.size());
  if (spec.per_qid_target) target = std::min(target, *spec.per_qid_target);
  // Shrink the common target until every qid can fill it under the answer cap.
  while (target > 0) {
    const bool feasible = std::all_of(pools.begin(), pools.end(), [&](const auto& kv) {
      return capacity(kv.second, target, spec.tolerance) >= target;
    });
    if (feasible) break;
    --target;
  }

  std::vector<std::uint8_t> keep(triples.size(), 0);
  for (auto& [qid, pool] : pools) {
    std::sort(pool.indices.begin(), pool.indices.end(), [&](std::size_t a, std::size_t b) {
      return triples[a].triple_id < triples[b].triple_id;
    });
    // Efraimidis-Spirakis keys log(u)/w with w = 1/count(answer).
    Rng rng(derive_seed(spec.seed, {"balance", std::to_string(qid)}));
    std::vector<std::pair<double, std::size_t>> keyed;
    keyed.reserve(pool.indices.size());
    for (std::size_t idx : pool.indices) {
      double u = rng.uniform();
      while (u == 0.0) u = rng.uniform();
      const double weight = 1.0 / static_cast<double>(pool.answer_counts[triples[idx].answer]);
      keyed.emplace_back(std::log(u) / weight, idx);
    }
    std::stable_sort(keyed.begin(), keyed.end(),
                     [](const auto& a, const auto& b) { return a.first > b.first; });
    const std::size_t cap = answer_cap(target, pool.answer_counts.size(), spec.tolerance);
    std::map<std::string, std::size_t> taken;
    std::size_t selected = 0;
    for (const auto& [key, idx] : keyed) {
      if (selected == target) break;
      auto& n = taken[triples[idx].answer];
      if (n >= cap) continue;
      ++n;
      ++selected;
      keep[idx] = 1;
    }
  }

  BalanceResult result;
  result.per_qid_target = target;
  for (std::size_t i = 0; i < triples.size(); ++i) {
    if (keep[i]) result.triples.push_back(triples[i]);
  }
  return result;
}

double DistributionReport::qid_deviation() const {
  if (per_qid.empty()) return 0.0;
  std::size_t lo = std::numeric_limits<std::size_t>::max();
  std::size_t hi = 0;
  for (const auto& [qid, n] : per_qid) {
    lo = std::min(lo, n);
    hi = std::max(hi, n);
  }
  return static_cast<double>(hi) / static_cast<double>(lo) - 1.0;
}

double DistributionReport::category_share(QuestionCategory category) const {
  if (total == 0) return 0.0;
  const auto it = per_category.find(category);
  return it == per_category.end() ? 0.0 : static_cast<double>(it->second) / static_cast<double>(total);
}

DistributionReport distribution_report(const std::vector<Triple>& triples) {
  DistributionReport r;
  for (const auto& t : triples) {
    ++r.total;
    ++r.per_qid[t.qid];
    ++r.per_answer[t.qid][t.answer];
    ++r.per_category[t.category];
  }
  return r;
}

nlohmann::json to_json(const DistributionReport& report) {
  nlohmann::json doc;
  doc["total"] = report.total;
  doc["qid_deviation"] = report.qid_deviation();
  nlohmann::json qids = nlohmann::json::object();
  for (const auto& [qid, n] : report.per_qid) {
    qids[std::to_string(qid)] = {{"count", n},
                                 {"answers", report.per_answer.at(qid)},
                                 {"chi_square", chi_square(report.per_answer.at(qid))}};
  }
  doc["qids"] = std::move(qids);
  nlohmann::json cats = nlohmann::json::object();
  for (auto c : {QuestionCategory::basic, QuestionCategory::independent, QuestionCategory::related}) {
    const auto it = report.per_category.find(c);
    cats[std::string(to_string(c))] = {{"count", it == report.per_category.end() ? 0 : it->second},
                                       {"share", report.category_share(c)}};
  }
  doc["categories"] = std::move(cats);
  return doc;
}

double chi_square(const std::map<std::string, std::size_t>& counts) {
  if (counts.empty()) return 0.0;
  std::size_t total = 0;
  for (const auto& [a, n] : counts) total += n;
  if (total == 0) return 0.0;
  const double expected = static_cast<double>(total) / static_cast<double>(counts.size());
  double stat = 0.0;
  for (const auto& [a, n] : counts) {
    const double d = static_cast<double>(n) - expected;
    stat += d * d / expected;
  }
  return stat;
}

}  // namespace rscm
