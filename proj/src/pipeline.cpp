#include "rscm/pipeline.hpp"

#include <algorithm>
#include <atomic>
#include <exception>
#include <map>
#include <mutex>
#include <thread>

#include "rscm/hash.hpp"

namespace rscm {

namespace fs = std::filesystem;

std::string record_id_for(std::string_view image_id, std::optional<std::string_view> instance_id,
                          ItemKind kind) {
  std::string id(image_id);
  if (kind == ItemKind::untampered) return id + "-orig";
  id += '-';
  id += instance_id.value_or("");
  id += kind == ItemKind::copy_move ? "-cm" : "-blur";
  return id;
}

namespace {

struct ItemOutput {
  std::vector<ItemEntry> entries;
  std::vector<Triple> triples;
  std::map<std::string, std::string> checksums;
  std::vector<std::string> warnings;
  std::size_t copy_move = 0;
  std::size_t blur = 0;
};

class Generator {
 public:
  Generator(const GenerateConfig& config, Registry registry)
      : config_(config), registry_(std::move(registry)) {
    place_options_.max_attempts = config.max_attempts;
    place_options_.max_overlap = config.max_overlap;
    place_options_.area = config.area;
  }

  ItemOutput run(const CorpusItem& item) const {
    ItemOutput out;
    const LoadedItem loaded = load_item(item);
    const BinaryMask empty(loaded.image.size());

    std::map<ObjectClass, int> class_counts;
    for (const auto& inst : loaded.instances) ++class_counts[inst.class_label];

    {
      ItemEntry entry;
      entry.record_id = record_id_for(item.image_id, std::nullopt, ItemKind::untampered);
      entry.image_id = item.image_id;
      entry.kind = ItemKind::untampered;
      entry.theme = item.theme;
      write_item(config_.out_root, entry,
                 {loaded.image, loaded.image, loaded.semantic, empty, empty}, out.checksums);
      const FactSheet facts = untampered_facts({item.theme, 0});
      append(out.triples, synthesize(facts, entry.record_id, registry_));
      out.entries.push_back(std::move(entry));
    }

    for (const auto& inst : loaded.instances) {
      const Eligibility e = check_eligibility(inst, loaded.image.size(), config_.area);
      if (!e.eligible()) {
        out.warnings.push_back(item.image_id + "/" + inst.instance_id + ": skipped (" +
                               std::string(to_string(*e.rejected)) + ")");
        continue;
      }
      const ItemContext context{item.theme, class_counts[inst.class_label]};

      Rng cm_rng(derive_seed(config_.seed, {item.image_id, inst.instance_id, "copy_move"}));
      auto cm = tamper_copy_move(loaded.image, inst, cm_rng, config_.sampler, place_options_);
      if (cm) {
        emit(out, item, loaded, inst, context, ItemKind::copy_move, std::move(*cm));
        ++out.copy_move;
      } else {
        out.warnings.push_back(item.image_id + "/" + inst.instance_id + ": no placement within " +
                               std::to_string(config_.max_attempts) + " attempts");
      }

      if (config_.kind != DatasetKind::tqa) continue;
      Rng choice(derive_seed(config_.seed, {item.image_id, inst.instance_id, "choice"}));
      if (!choice.bernoulli(config_.blur_probability)) continue;
      Rng blur_rng(derive_seed(config_.seed, {item.image_id, inst.instance_id, "blur"}));
      emit(out, item, loaded, inst, context, ItemKind::blur,
           tamper_blur(loaded.image, inst, blur_rng, config_.sampler));
      ++out.blur;
    }
    return out;
  }

 private:
  static void append(std::vector<Triple>& dst, std::vector<Triple> src) {
    for (auto& t : src) dst.push_back(std::move(t));
  }

  void emit(ItemOutput& out, const CorpusItem& item, const LoadedItem& loaded,
            const SourceInstance& inst, const ItemContext& context, ItemKind kind,
            TamperOutcome outcome) const {
    TamperRecord& record = outcome.record;
    record.record_id = record_id_for(item.image_id, inst.instance_id, kind);
    const FactSheet facts = derive_facts(record, context, registry_.thresholds);

    ItemEntry entry;
    entry.record_id = record.record_id;
    entry.image_id = item.image_id;
    entry.kind = kind;
    entry.instance_id = inst.instance_id;
    entry.class_label = inst.class_label;
    entry.params = record.params;
    entry.theme = item.theme;
    entry.class_instance_count = context.class_instance_count;
    entry.degenerate = record.degenerate;
    if (record.degenerate) out.warnings.push_back(record.record_id + ": degenerate (no pixel changed)");
    write_item(config_.out_root, entry,
               {outcome.tampered, loaded.image, loaded.semantic, record.src_mask, record.tmp_mask},
               out.checksums);
    append(out.triples, synthesize(facts, entry.record_id, registry_));
    out.entries.push_back(std::move(entry));
  }

  const GenerateConfig& config_;
  Registry registry_;
  PlaceOptions place_options_;
};

nlohmann::json config_json(const GenerateConfig& c) {
  return {{"max_attempts", c.max_attempts},
          {"blur_probability", c.blur_probability},
          {"max_overlap", c.max_overlap},
          {"min_area_ratio", c.area.min_ratio},
          {"max_area_ratio", c.area.max_ratio},
          {"unit_scale_probability", c.sampler.unit_scale_probability},
          {"scale_range", {c.sampler.scale_min, c.sampler.scale_max}},
          {"no_rotation_probability", c.sampler.no_rotation_probability},
          {"rotation_range_deg", {c.sampler.rotation_min_deg, c.sampler.rotation_max_deg}},
          {"gaussian_sigma_range", {c.sampler.gaussian_sigma_min, c.sampler.gaussian_sigma_max}},
          {"mosaic_blocks", c.sampler.mosaic_blocks},
          {"daub_radius", c.sampler.daub_radius}};
}

void write_splits(const fs::path& root, Manifest& manifest, const SplitAssignment& assignment) {
  SplitInfo info;
  info.seed = assignment.seed;
  info.ratios = assignment.ratios;
  std::array<std::vector<std::string>, 3> lists;
  for (const auto& e : manifest.items) {
    lists[static_cast<int>(assignment.groups.at(e.image_id))].push_back(e.record_id);
  }
  for (int s = 0; s < 3; ++s) {
    std::sort(lists[s].begin(), lists[s].end());
    write_id_list(lists[s], root / info.files[s]);
    manifest.checksums[info.files[s]] = sha256_file(root / info.files[s]);
  }
  manifest.splits = info;
}

std::vector<std::string> raw_groups(const Manifest& manifest) {
  std::vector<std::string> groups;
  for (const auto& e : manifest.items) groups.push_back(e.image_id);
  return groups;
}

}  // namespace

GenerateSummary generate_dataset(const GenerateConfig& config) {
  if (config.max_attempts < 1) throw Error(Errc::config_error, "max_attempts must be >= 1");
  if (config.blur_probability < 0.0 || config.blur_probability > 1.0) {
    throw Error(Errc::config_error, "blur_probability must be within [0, 1]");
  }
  Registry registry = config.registry_path ? load_registry(*config.registry_path) : default_registry(config.kind);
  if (registry.kind != config.kind) throw Error(Errc::config_error, "registry kind does not match dataset kind");

  const std::vector<CorpusItem> corpus = load_corpus(config.corpus_root, true);
  if (corpus.empty()) throw Error(Errc::empty_input, "corpus has no items");

  std::error_code ec;
  fs::create_directories(config.out_root, ec);
  if (ec) throw Error(Errc::io_failure, "cannot create " + config.out_root.string());
  // A stale manifest must not describe a half-written tree.
  fs::remove(config.out_root / kManifestName, ec);

  const Generator generator(config, registry);
  std::vector<ItemOutput> outputs(corpus.size());
  std::vector<std::exception_ptr> errors(corpus.size());
  std::atomic<std::size_t> next{0};
  const auto worker = [&] {
    for (std::size_t i = next++; i < corpus.size(); i = next++) {
      try {
        outputs[i] = generator.run(corpus[i]);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  const unsigned n_workers = std::max(1u, std::min<unsigned>(config.workers, static_cast<unsigned>(corpus.size())));
  if (n_workers == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (unsigned w = 0; w < n_workers; ++w) pool.emplace_back(worker);
  }
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }

  GenerateSummary summary;
  summary.corpus_items = corpus.size();
  Manifest manifest;
  manifest.global_seed = config.seed;
  manifest.dataset_kind = config.kind;
  manifest.config = config_json(config);
  std::vector<Triple> triples;
  for (auto& out : outputs) {
    summary.copy_move_records += out.copy_move;
    summary.blur_records += out.blur;
    for (auto& w : out.warnings) summary.warnings.push_back(std::move(w));
    for (auto& e : out.entries) manifest.items.push_back(std::move(e));
    for (auto& t : out.triples) triples.push_back(std::move(t));
    manifest.checksums.merge(out.checksums);
  }
  summary.untampered_items = corpus.size();
  std::sort(manifest.items.begin(), manifest.items.end(),
            [](const auto& a, const auto& b) { return a.record_id < b.record_id; });
  std::sort(triples.begin(), triples.end(), [](const Triple& a, const Triple& b) {
    return std::tie(a.image_id, a.qid) < std::tie(b.image_id, b.qid);
  });

  write_triples(triples, config.out_root / manifest.triples_file);
  manifest.checksums[manifest.triples_file] = sha256_file(config.out_root / manifest.triples_file);
  save_registry(config.out_root / manifest.registry_file, registry);
  manifest.checksums[manifest.registry_file] = sha256_file(config.out_root / manifest.registry_file);
  manifest.triple_count = triples.size();
  summary.triples = triples.size();

  write_splits(config.out_root, manifest, split(raw_groups(manifest), config.split_ratios, config.seed));
  write_manifest(manifest, config.out_root / kManifestName);
  return summary;
}

SplitAssignment resplit_dataset(const fs::path& root, const SplitRatios& ratios, std::uint64_t seed) {
  Manifest manifest = read_manifest(root / kManifestName, true);
  SplitAssignment assignment = split(raw_groups(manifest), ratios, seed);
  write_splits(root, manifest, assignment);
  write_manifest(manifest, root / kManifestName);
  return assignment;
}

BalanceResult balance_dataset(const fs::path& root, const BalanceSpec& spec) {
  Manifest manifest = read_manifest(root / kManifestName, true);
  const Registry registry = load_registry(root / manifest.registry_file);
  const std::vector<Triple> triples = read_triples(root / manifest.triples_file);
  std::vector<int> qids;
  for (const auto& t : registry.templates) qids.push_back(t.qid);
  BalanceResult result = balance(triples, spec, qids);

  BalanceInfo info;
  info.tolerance = spec.tolerance;
  info.seed = spec.seed;
  info.per_qid_target = result.per_qid_target;
  write_triples(result.triples, root / info.file);
  manifest.checksums[info.file] = sha256_file(root / info.file);
  manifest.balance = info;
  write_manifest(manifest, root / kManifestName);
  return result;
}

}  // namespace rscm
