#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "rscm/curator.hpp"
#include "rscm/dataset_io.hpp"
#include "rscm/qa.hpp"
#include "rscm/tamper.hpp"

namespace rscm {

struct GenerateConfig {
  std::filesystem::path corpus_root;
  std::filesystem::path out_root;
  DatasetKind kind = DatasetKind::cmqa;
  std::uint64_t seed = 0;
  unsigned workers = 1;
  int max_attempts = 100;
  /// tqa only: chance that an eligible instance also yields a blur record.
  double blur_probability = 0.5;
  std::optional<std::filesystem::path> registry_path;
  SplitRatios split_ratios;
  SamplerConfig sampler;
  AreaBounds area;
  double max_overlap = 0.05;
};

struct GenerateSummary {
  std::size_t corpus_items = 0;
  std::size_t copy_move_records = 0;
  std::size_t blur_records = 0;
  std::size_t untampered_items = 0;
  std::size_t triples = 0;
  std::vector<std::string> warnings;
};

/// Runs the full generation: per image, every eligible instance gets a
/// copy-move record (and in tqa mode possibly a blur record); every image also
/// yields an untampered item. Writes rasters, triples, registry, splits and,
/// last, the manifest. Output bytes depend only on (corpus, seed, config).
GenerateSummary generate_dataset(const GenerateConfig& config);

/// Record ids: "<image>-<instance>-cm", "<image>-<instance>-blur", "<image>-orig".
std::string record_id_for(std::string_view image_id, std::optional<std::string_view> instance_id,
                          ItemKind kind);

/// Re-splits a generated dataset and rewrites its split files and manifest.
SplitAssignment resplit_dataset(const std::filesystem::path& root, const SplitRatios& ratios,
                                std::uint64_t seed);

/// Balances a generated dataset's triples into BalanceInfo::file and records it in the manifest.
BalanceResult balance_dataset(const std::filesystem::path& root, const BalanceSpec& spec);

}  // namespace rscm
