// rscm: generate, curate, verify and score tampering question-answer datasets.

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <thread>

#include "CLI11.hpp"
#include "rscm/curator.hpp"
#include "rscm/dataset_io.hpp"
#include "rscm/evalkit.hpp"
#include "rscm/oracle.hpp"
#include "rscm/pipeline.hpp"

namespace {

namespace fs = std::filesystem;

enum Exit { kOk = 0, kViolations = 1, kConfig = 2, kInput = 3, kRuntime = 4 };

int exit_code_for(rscm::Errc code) {
  using rscm::Errc;
  switch (code) {
    case Errc::config_error: return kConfig;
    case Errc::missing_file:
    case Errc::bad_dimensions:
    case Errc::non_binary_mask:
    case Errc::bad_format:
    case Errc::parse_error:
    case Errc::empty_input:
    case Errc::checksum_mismatch:
    case Errc::missing_qid:
    case Errc::duplicate_triple_id:
    case Errc::unknown_triple_id:
    case Errc::missing_prediction:
    case Errc::empty_gold:
    case Errc::unknown_qid:
    case Errc::basis_mismatch:
      return kInput;
    default:
      return kRuntime;
  }
}

unsigned resolve_workers(int flag) {
  if (flag > 0) return static_cast<unsigned>(flag);
  if (const char* env = std::getenv("RSCM_WORKERS")) {
    const int v = std::atoi(env);
    if (v > 0) return static_cast<unsigned>(v);
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw rscm::Error(rscm::Errc::io_failure, "cannot write " + path.string());
  out << text;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Copy-move / blur tampering dataset toolkit"};
  app.require_subcommand(1);
  app.fallthrough();
  app.set_config("--config", "", "TOML/INI config file; command-line flags take precedence");

  std::uint64_t seed = 0;
  int workers = 0;
  std::string out_dir = "out";
  app.add_option("--seed", seed, "Global random seed")->capture_default_str();
  app.add_option("--workers", workers, "Worker threads (default: $RSCM_WORKERS, else core count)");
  app.add_option("--out", out_dir, "Dataset directory")->capture_default_str();

  // generate
  auto* gen = app.add_subcommand("generate", "Synthesize tampered items, masks, triples and manifest");
  std::string corpus;
  std::string kind_name = "cmqa";
  int max_attempts = 100;
  double blur_probability = 0.5;
  std::string registry_path;
  gen->add_option("--corpus", corpus, "Corpus root containing index.json")->required();
  gen->add_option("--kind", kind_name, "Dataset kind")->check(CLI::IsMember({"cmqa", "tqa"}))->capture_default_str();
  gen->add_option("--max-attempts", max_attempts, "Placement draws per instance")->check(CLI::PositiveNumber)->capture_default_str();
  gen->add_option("--blur-probability", blur_probability, "tqa: chance an instance also gets a blur record")
      ->check(CLI::Range(0.0, 1.0))->capture_default_str();
  gen->add_option("--registry", registry_path, "Question registry JSON (default: built-in)");

  // balance
  auto* bal = app.add_subcommand("balance", "Build the balanced subset");
  double tolerance = 0.02;
  std::size_t per_qid_target = 0;
  std::string bal_input, bal_output;
  bal->add_option("--tolerance", tolerance, "Allowed per-qid / per-answer excess")->check(CLI::PositiveNumber)->capture_default_str();
  bal->add_option("--per-qid-target", per_qid_target, "Upper bound on triples per qid (0: none)");
  bal->add_option("--input", bal_input, "Standalone mode: triples file to balance");
  bal->add_option("--output", bal_output, "Standalone mode: output triples file");

  // split
  auto* spl = app.add_subcommand("split", "Assign raw-image groups to train/val/test");
  std::vector<double> ratios = {0.70, 0.15, 0.15};
  spl->add_option("--ratios", ratios, "train val test ratios")->expected(3)->capture_default_str();

  // stats
  auto* sts = app.add_subcommand("stats", "Question and answer distribution report");
  std::string stats_triples, stats_output;
  sts->add_option("--triples", stats_triples, "Triples file (default: <out>/triples.jsonl)");
  sts->add_option("--output", stats_output, "Write the report here instead of stdout");

  // verify
  auto* ver = app.add_subcommand("verify", "Independently re-check a generated dataset");
  bool strict_verify = false;
  std::string verify_report;
  ver->add_flag("--strict", strict_verify, "Treat warnings as violations");
  ver->add_option("--report", verify_report, "Write the full report here");

  // score
  auto* sco = app.add_subcommand("score", "Score predictions against gold triples");
  std::string gold_path, pred_path, score_report, score_csv, score_registry;
  std::vector<std::string> compare;
  bool strict_score = false;
  sco->add_option("--gold", gold_path, "Gold triples file");
  sco->add_option("--pred", pred_path, "Predictions file");
  sco->add_flag("--strict", strict_score, "Missing or unknown predictions are errors");
  sco->add_option("--report", score_report, "Write the metrics report JSON here");
  sco->add_option("--csv", score_csv, "Write a flat per-qid table here");
  sco->add_option("--registry", score_registry, "Registry fixing confusion-matrix labels");
  sco->add_option("--compare", compare, "Compare two metrics reports: A B")->expected(2);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kOk : kConfig;
  }

  const fs::path out(out_dir);
  try {
    if (*gen) {
      rscm::GenerateConfig config;
      config.corpus_root = corpus;
      config.out_root = out;
      config.kind = *rscm::parse_dataset_kind(kind_name);
      config.seed = seed;
      config.workers = resolve_workers(workers);
      config.max_attempts = max_attempts;
      config.blur_probability = blur_probability;
      if (!registry_path.empty()) config.registry_path = registry_path;
      const auto summary = rscm::generate_dataset(config);
      for (const auto& w : summary.warnings) std::cerr << "warning: " << w << '\n';
      std::cout << "images=" << summary.corpus_items << " copy_move=" << summary.copy_move_records
                << " blur=" << summary.blur_records << " untampered=" << summary.untampered_items
                << " triples=" << summary.triples << '\n';
      return kOk;
    }

    if (*bal) {
      rscm::BalanceSpec spec;
      spec.tolerance = tolerance;
      spec.seed = seed;
      if (per_qid_target > 0) spec.per_qid_target = per_qid_target;
      rscm::BalanceResult result;
      if (!bal_input.empty()) {
        if (bal_output.empty()) throw rscm::Error(rscm::Errc::config_error, "--input requires --output");
        result = rscm::balance(rscm::read_triples(bal_input), spec);
        rscm::write_triples(result.triples, bal_output);
      } else {
        result = rscm::balance_dataset(out, spec);
      }
      const auto report = rscm::distribution_report(result.triples);
      std::printf("per_qid_target=%zu triples=%zu deviation=%.4f\n", result.per_qid_target,
                  result.triples.size(), report.qid_deviation());
      return kOk;
    }

    if (*spl) {
      const auto assignment = rscm::resplit_dataset(out, {ratios[0], ratios[1], ratios[2]}, seed);
      const auto c = assignment.counts();
      std::printf("groups train=%zu val=%zu test=%zu\n", c[0], c[1], c[2]);
      return kOk;
    }

    if (*sts) {
      const fs::path path = stats_triples.empty() ? out / "triples.jsonl" : fs::path(stats_triples);
      const std::string text = rscm::to_json(rscm::distribution_report(rscm::read_triples(path))).dump(2) + "\n";
      if (stats_output.empty()) {
        std::cout << text;
      } else {
        write_text(stats_output, text);
      }
      return kOk;
    }

    if (*ver) {
      const auto report = rscm::oracle::verify_dataset(out, {strict_verify});
      if (!verify_report.empty()) write_text(verify_report, rscm::oracle::to_json(report).dump(2) + "\n");
      for (const auto& v : report.violations) {
        std::cerr << "violation: " << v.item_id << " " << v.rule_id << " " << v.detail << '\n';
      }
      std::printf("items_checked=%zu violations=%zu warnings=%zu pass=%s\n", report.items_checked,
                  report.violations.size(), report.warnings.size(), report.pass() ? "true" : "false");
      return report.pass() ? kOk : kViolations;
    }

    if (*sco) {
      if (!compare.empty()) {
        const auto load = [](const std::string& p) {
          std::ifstream in(p);
          if (!in) throw rscm::Error(rscm::Errc::missing_file, p);
          return rscm::report_from_json(nlohmann::json::parse(in));
        };
        for (const auto& row : rscm::compare_reports(load(compare[0]), load(compare[1]))) {
          std::printf("%s %.2f %.2f %s\n", row.key.c_str(), row.a, row.b, row.marked.c_str());
        }
        return kOk;
      }
      if (gold_path.empty() || pred_path.empty()) {
        throw rscm::Error(rscm::Errc::config_error, "score needs --gold and --pred (or --compare A B)");
      }
      std::optional<rscm::Registry> registry;
      if (!score_registry.empty()) registry = rscm::load_registry(score_registry);
      const auto report = rscm::score(rscm::read_triples(gold_path), rscm::read_predictions(pred_path),
                                      {strict_score}, registry ? &*registry : nullptr);
      if (report.missing_predictions > 0) {
        std::cerr << "warning: " << report.missing_predictions << " gold triples have no prediction\n";
      }
      std::printf("OA=%.2f AA=%.2f\n", rscm::round2(report.oa), rscm::round2(report.aa));
      for (const auto& [qid, q] : report.per_qid) {
        std::printf("Q%d %zu/%zu %.2f\n", qid, q.correct, q.total, rscm::round2(q.accuracy));
      }
      if (!score_report.empty()) write_text(score_report, rscm::to_json(report).dump(2) + "\n");
      if (!score_csv.empty()) write_text(score_csv, rscm::to_csv(report));
      return kOk;
    }
  } catch (const rscm::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return exit_code_for(e.code());
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kRuntime;
  }
  return kOk;
}
