#pragma once

#include <cstdint>
#include <filesystem>
#include <vector>

#include "rscm/dataset_io.hpp"

namespace rscm {

struct FixtureOptions {
  int images = 20;
  /// Eligible drawn objects per image (one of them a frame-crossing road).
  int objects_per_image = 6;
  /// Also draw one too-small and one border-touching object per image.
  bool include_ineligible = true;
};

/// Writes a synthetic 512x512 corpus of textured backgrounds with drawn shapes
/// as instances, plus index.json, under `root`. Deterministic in `seed`.
std::vector<CorpusItem> make_fixture_corpus(const std::filesystem::path& root, std::uint64_t seed,
                                            const FixtureOptions& options = {});

}  // namespace rscm
