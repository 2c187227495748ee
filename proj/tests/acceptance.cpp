// End-to-end acceptance run. Prints one PASS/FAIL line per criterion and exits
// nonzero if any criterion fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <set>
#include <sstream>
#include <thread>

#include "fault_catalog.hpp"
#include "helpers.hpp"
#include "rscm/curator.hpp"
#include "rscm/dataset_io.hpp"
#include "rscm/evalkit.hpp"
#include "rscm/fixture.hpp"
#include "rscm/oracle.hpp"
#include "rscm/pipeline.hpp"
#include "rscm/png_io.hpp"
#include "tree_hash.hpp"

using namespace rscm;
namespace fs = std::filesystem;

namespace {

struct Verdict {
  bool pass = false;
  std::string detail;
};

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

struct Workspace {
  fs::path root = testutil::scratch_dir("acceptance");
  fs::path corpus20;
  fs::path cmqa20;
  fs::path tqa20;
  fs::path big;
};

GenerateConfig config(const fs::path& corpus, const fs::path& out, DatasetKind kind, std::uint64_t seed) {
  GenerateConfig cfg;
  cfg.corpus_root = corpus;
  cfg.out_root = out;
  cfg.kind = kind;
  cfg.seed = seed;
  cfg.workers = 1;
  return cfg;
}

std::map<std::string, std::size_t> triples_per_item(const fs::path& root) {
  std::map<std::string, std::size_t> n;
  for (const auto& t : read_triples(root / "triples.jsonl")) ++n[t.image_id];
  return n;
}

// 1. Triple cardinality per record kind on a 20-image fixture, single-threaded.
Verdict structural_constants(Workspace& ws) {
  ws.corpus20 = ws.root / "corpus20";
  ws.cmqa20 = ws.root / "cmqa20";
  ws.tqa20 = ws.root / "tqa20";
  make_fixture_corpus(ws.corpus20, 1, {});

  auto t0 = std::chrono::steady_clock::now();
  const auto cm = generate_dataset(config(ws.corpus20, ws.cmqa20, DatasetKind::cmqa, 7));
  const double cm_secs = seconds_since(t0);
  t0 = std::chrono::steady_clock::now();
  const auto tq = generate_dataset(config(ws.corpus20, ws.tqa20, DatasetKind::tqa, 7));
  const double tq_secs = seconds_since(t0);

  std::size_t bad = 0, cm14 = 0, cm15 = 0, blur8 = 0;
  for (const auto& [root, kind] : {std::pair{ws.cmqa20, DatasetKind::cmqa}, std::pair{ws.tqa20, DatasetKind::tqa}}) {
    const auto manifest = read_manifest(root / kManifestName);
    const auto counts = triples_per_item(root);
    for (const auto& e : manifest.items) {
      const std::size_t n = counts.contains(e.record_id) ? counts.at(e.record_id) : 0;
      if (e.kind == ItemKind::copy_move) {
        const std::size_t want = kind == DatasetKind::cmqa ? 14 : 15;
        (n == want ? (want == 14 ? cm14 : cm15) : bad) += 1;
      } else if (e.kind == ItemKind::blur) {
        (n == 8 ? blur8 : bad) += 1;
      } else if (n != 1) {
        ++bad;
      }
    }
  }
  Verdict v;
  v.pass = bad == 0 && cm.corpus_items == 20 && cm.copy_move_records >= 20 && tq.blur_records > 0 &&
           cm_secs < 60.0 && tq_secs < 60.0;
  v.detail = "cmqa " + std::to_string(cm14) + " records x14, tqa " + std::to_string(cm15) + " x15 + " +
             std::to_string(blur8) + " blur x8, " + std::to_string(bad) + " off-count; runtime cmqa " +
             fmt("%.1f", cm_secs) + " s, tqa " + fmt("%.1f", tq_secs) + " s (limit 60 s each)";
  return v;
}

// 2. Constraint satisfaction over >= 500 records, checked by the oracle.
Verdict constraint_satisfaction(Workspace& ws) {
  const fs::path corpus = ws.root / "corpus48";
  ws.big = ws.root / "tqa48";
  FixtureOptions fx;
  fx.images = 48;
  fx.objects_per_image = 8;
  make_fixture_corpus(corpus, 2, fx);
  auto cfg = config(corpus, ws.big, DatasetKind::tqa, 11);
  cfg.workers = std::max(1u, std::thread::hardware_concurrency());
  const auto summary = generate_dataset(cfg);
  const std::size_t records = summary.copy_move_records + summary.blur_records;
  const auto report = oracle::verify_dataset(ws.big);
  std::map<std::string, int> by_rule;
  for (const auto& f : report.violations) ++by_rule[f.rule_id];
  std::string rules;
  for (const auto& [r, n] : by_rule) rules += " " + r + "=" + std::to_string(n);
  Verdict v;
  v.pass = records >= 500 && report.pass();
  v.detail = std::to_string(records) + " records (" + std::to_string(summary.copy_move_records) + " copy-move, " +
             std::to_string(summary.blur_records) + " blur), " + std::to_string(report.violations.size()) +
             " violations" + rules;
  return v;
}

// 3. Byte-diff support of every copy-move record lies inside its tampering mask.
Verdict pixel_diff_exactness(Workspace& ws) {
  std::size_t records = 0, failures = 0;
  for (const auto& root : {ws.big, ws.cmqa20, ws.tqa20}) {
    const auto manifest = read_manifest(root / kManifestName, false);
    for (const auto& e : manifest.items) {
      if (e.kind != ItemKind::copy_move) continue;
      ++records;
      const auto tampered = read_rgb_png(root / e.files.at(Role::tampered));
      const auto original = read_rgb_png(root / e.files.at(Role::original));
      const auto tmp = read_gray_png(root / e.files.at(Role::tampering));
      bool ok = true;
      for (int y = 0; y < tampered.height() && ok; ++y) {
        for (int x = 0; x < tampered.width(); ++x) {
          if (tmp(y, x) != 0) continue;
          if (tampered.pixel(x, y) != original.pixel(x, y)) {
            ok = false;
            break;
          }
        }
      }
      failures += !ok;
    }
  }
  return {records > 0 && failures == 0,
          std::to_string(records) + " copy-move records, " + std::to_string(failures) + " with changes outside the mask"};
}

// 4. Answer recomputation and fault sensitivity.
Verdict answer_recomputability(Workspace& ws) {
  std::size_t mismatches = 0, items = 0;
  for (const auto& root : {ws.big, ws.tqa20, ws.cmqa20}) {
    const auto manifest = read_manifest(root / kManifestName, false);
    const auto registry = load_registry(root / "registry.json");
    std::map<std::string, std::vector<Triple>> by_item;
    for (const auto& t : read_triples(root / "triples.jsonl")) by_item[t.image_id].push_back(t);
    for (const auto& e : manifest.items) {
      ++items;
      mismatches += oracle::recompute_answers(e, by_item[e.record_id], registry, root).mismatches.size();
    }
  }

  // Fault catalog on a small balanced dataset.
  const fs::path small_corpus = ws.root / "corpus3";
  const fs::path small = ws.root / "tqa3";
  FixtureOptions fx;
  fx.images = 3;
  make_fixture_corpus(small_corpus, 3, fx);
  auto cfg = config(small_corpus, small, DatasetKind::tqa, 5);
  cfg.blur_probability = 1.0;
  generate_dataset(cfg);
  balance_dataset(small, {});
  const bool clean = oracle::verify_dataset(small).pass();
  const auto list = faults::catalog();
  std::size_t detected = 0;
  std::string missed;
  int i = 0;
  for (const auto& fault : list) {
    const fs::path dir = ws.root / "faults" / std::to_string(i++);
    faults::clone_dataset(small, dir);
    fault.inject(dir);
    const auto report = oracle::verify_dataset(dir);
    if (report.has_violation(fault.expected_rule)) {
      ++detected;
    } else {
      missed += " [" + fault.name + "]";
    }
  }
  Verdict v;
  v.pass = mismatches == 0 && clean && list.size() >= 10 && detected == list.size();
  v.detail = std::to_string(mismatches) + " mismatches over " + std::to_string(items) + " items; faults detected " +
             std::to_string(detected) + "/" + std::to_string(list.size()) + missed;
  return v;
}

// 5. Balancing a skewed set: qid counts span 10x and answers are uneven.
Verdict balance_criterion(Workspace&) {
  std::vector<Triple> triples;
  int serial = 0;
  for (int qid = 1; qid <= 14; ++qid) {
    const int n = static_cast<int>(std::lround(100.0 * std::pow(10.0, (qid - 1) / 13.0)));
    const int m = 2 + qid % 3;  // answers in this qid
    const int weight_sum = m * (m + 1) / 2;
    int given = 0;
    for (int j = 0; j < m; ++j) {
      const int count = j + 1 < m ? n * (m - j) / weight_sum : n - given;
      given += count;
      for (int k = 0; k < count; ++k) {
        Triple t;
        t.image_id = "item" + std::to_string(serial++);
        t.qid = qid;
        t.triple_id = make_triple_id(t.image_id, qid);
        t.answer = "a" + std::to_string(j);
        triples.push_back(t);
      }
    }
  }
  std::map<int, std::map<std::string, std::size_t>> before, after;
  for (const auto& t : triples) ++before[t.qid][t.answer];
  std::size_t lo = SIZE_MAX, hi = 0;
  for (const auto& [qid, answers] : before) {
    std::size_t n = 0;
    for (const auto& [a, c] : answers) n += c;
    lo = std::min(lo, n);
    hi = std::max(hi, n);
  }

  const auto result = balance(triples, {0.02, 2024, std::nullopt});
  for (const auto& t : result.triples) ++after[t.qid][t.answer];
  std::size_t out_lo = SIZE_MAX, out_hi = 0;
  int reduced = 0;
  for (const auto& [qid, answers] : before) {
    std::map<std::string, std::size_t> out;
    for (const auto& [a, c] : answers) out[a] = after[qid].contains(a) ? after[qid][a] : 0;  // zero-filled
    std::size_t n = 0;
    for (const auto& [a, c] : out) n += c;
    out_lo = std::min(out_lo, n);
    out_hi = std::max(out_hi, n);
    reduced += chi_square(out) < chi_square(answers);
  }
  const double deviation = out_lo == 0 ? INFINITY : static_cast<double>(out_hi) / static_cast<double>(out_lo) - 1.0;
  Verdict v;
  v.pass = static_cast<double>(hi) / lo >= 10.0 && deviation <= 0.02 && reduced == 14;
  v.detail = "input qid span " + fmt("%.2f", static_cast<double>(hi) / lo) + "x; per-qid target " +
             std::to_string(result.per_qid_target) + ", deviation " + fmt("%.4f", deviation) +
             " (limit 0.02); chi-square reduced in " + std::to_string(reduced) + "/14 qids";
  return v;
}

// 6. Exact 700/150/150 group split, with derivatives co-located.
Verdict split_criterion(Workspace& ws) {
  std::vector<std::string> groups;
  std::vector<std::pair<std::string, std::string>> items;  // (item, group)
  for (int i = 0; i < 1000; ++i) {
    const std::string g = "raw" + std::to_string(i);
    groups.push_back(g);
    items.emplace_back(g + "-orig", g);
    for (int k = 0; k < 1 + i % 4; ++k) items.emplace_back(g + "-obj" + std::to_string(k) + "-cm", g);
  }
  const auto assignment = split(groups, {}, 31);
  const auto c = assignment.counts();
  std::map<std::string, std::set<Split>> where;
  for (const auto& [item, g] : items) where[g].insert(assignment.groups.at(g));
  std::size_t split_groups = 0;
  for (const auto& [g, s] : where) split_groups += s.size() != 1;

  // The generated dataset's split files must agree too.
  const auto manifest = read_manifest(ws.big / kManifestName, false);
  std::map<std::string, std::string> image_of;
  for (const auto& e : manifest.items) image_of[e.record_id] = e.image_id;
  std::map<std::string, std::set<int>> file_where;
  for (int s = 0; s < 3; ++s)
    for (const auto& id : read_id_list(ws.big / manifest.splits->files[s])) file_where[image_of.at(id)].insert(s);
  for (const auto& [g, s] : file_where) split_groups += s.size() != 1;

  Verdict v;
  v.pass = c == std::array<std::size_t, 3>{700, 150, 150} && split_groups == 0;
  v.detail = "1000 groups -> " + std::to_string(c[0]) + "/" + std::to_string(c[1]) + "/" + std::to_string(c[2]) +
             "; groups spanning splits: " + std::to_string(split_groups);
  return v;
}

// 7. Metric fixtures and the duplication invariant.
Verdict metrics_criterion(Workspace&) {
  const auto g = [](std::string id, int qid, std::string a) {
    Triple t;
    t.triple_id = id;
    t.image_id = id;
    t.qid = qid;
    t.answer = std::move(a);
    return t;
  };
  const std::vector<Triple> gold1 = {g("a1", 1, "yes"), g("a2", 1, "no"), g("b1", 2, "ship"), g("b2", 2, "tree")};
  const std::vector<Prediction> pred1 = {{"a1", "yes"}, {"a2", "yes"}, {"b1", "ship"}, {"b2", "tree"}};
  std::vector<Triple> gold2 = {g("a1", 1, "yes"), g("b1", 2, "north"), g("b2", 2, "south"), g("b3", 2, "east")};
  std::vector<Prediction> pred2 = {{"a1", "yes"}, {"b1", "north"}, {"b2", "north"}, {"b3", "west"}};
  const auto r1 = score(gold1, pred1);
  const auto r2 = score(gold2, pred2);
  const bool f1 = round2(r1.oa) == 75.00 && round2(r1.aa) == 75.00;
  const bool f2 = round2(r2.oa) == 50.00 && round2(r2.aa) == 66.67;

  for (const auto& id : {"b1", "b2", "b3"}) {
    gold2.push_back(g(std::string(id) + "x", 2, gold2[id[1] - '0'].answer));
    pred2.push_back({std::string(id) + "x", pred2[id[1] - '0'].answer});
  }
  const auto dup = score(gold2, pred2);
  const bool invariant = std::fabs(dup.aa - r2.aa) < 1e-9 && std::fabs(dup.oa - r2.oa) > 1e-6;
  Verdict v;
  v.pass = f1 && f2 && invariant;
  v.detail = "fixture A OA=" + fmt("%.2f", round2(r1.oa)) + " AA=" + fmt("%.2f", round2(r1.aa)) +
             "; fixture B OA=" + fmt("%.2f", round2(r2.oa)) + " AA=" + fmt("%.2f", round2(r2.aa)) +
             "; after duplicating one qid OA=" + fmt("%.2f", round2(dup.oa)) + " AA=" + fmt("%.2f", round2(dup.aa));
  return v;
}

// 8. Two identical runs produce byte-identical trees.
Verdict determinism(Workspace& ws) {
  const fs::path again = ws.root / "tqa20_again";
  generate_dataset(config(ws.corpus20, again, DatasetKind::tqa, 7));
  const auto a = testutil::tree_hashes(ws.tqa20);
  const auto b = testutil::tree_hashes(again);
  std::size_t differing = 0;
  for (const auto& [rel, h] : a) differing += !b.contains(rel) || b.at(rel) != h;
  const bool same = a == b && a.contains("manifest.json") && a.contains("triples.jsonl");
  return {same, std::to_string(a.size()) + " files hashed per run, " + std::to_string(differing) + " differ"};
}

// 9. Sampler statistics.
Verdict sampler_statistics(Workspace&) {
  Rng rng(derive_seed(0, {"acceptance", "sampler"}));
  int zero = 0, out_of_range = 0;
  double lo = 2.0, hi = 0.0;
  for (int i = 0; i < 10000; ++i) {
    const auto p = sample_params(rng, TamperKind::copy_move);
    zero += p.rotation_deg == 0.0;
    out_of_range += p.scale < 0.5 || p.scale > 1.5;
    lo = std::min(lo, p.scale);
    hi = std::max(hi, p.scale);
  }
  const double frac = zero / 10000.0;
  return {frac >= 0.47 && frac <= 0.53 && out_of_range == 0,
          "rotation==0 fraction " + fmt("%.4f", frac) + " (want [0.47, 0.53]); scale range [" + fmt("%.4f", lo) +
              ", " + fmt("%.4f", hi) + "], " + std::to_string(out_of_range) + " outside [0.5, 1.5]"};
}

}  // namespace

int main() {
  Workspace ws;
  const std::vector<std::pair<std::string, std::function<Verdict(Workspace&)>>> criteria = {
      {"1 structural constants", structural_constants},
      {"2 constraint satisfaction", constraint_satisfaction},
      {"3 pixel-diff exactness", pixel_diff_exactness},
      {"4 answer recomputability", answer_recomputability},
      {"5 balance", balance_criterion},
      {"6 split", split_criterion},
      {"7 metrics", metrics_criterion},
      {"8 determinism", determinism},
      {"9 sampler statistics", sampler_statistics},
  };
  int failed = 0;
  for (const auto& [name, fn] : criteria) {
    Verdict v;
    try {
      v = fn(ws);
    } catch (const std::exception& e) {
      v = {false, std::string("exception: ") + e.what()};
    }
    failed += !v.pass;
    std::printf("%s  criterion %s: %s\n", v.pass ? "PASS" : "FAIL", name.c_str(), v.detail.c_str());
    std::fflush(stdout);
  }
  std::printf("%d/%zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
  return failed == 0 ? 0 : 1;
}
