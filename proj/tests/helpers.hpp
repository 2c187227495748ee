#pragma once

#include <cstdlib>
#include <filesystem>
#include <string>

#include <unistd.h>

#include "rscm/raster.hpp"
#include "rscm/rng.hpp"
#include "rscm/tamper.hpp"

namespace testutil {

inline rscm::RgbImage noise_image(int w, int h, std::uint64_t seed) {
  rscm::Rng rng(seed);
  rscm::RgbImage img(w, h);
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x)
      img.set_pixel(x, y, {static_cast<std::uint8_t>(rng.below(256)),
                           static_cast<std::uint8_t>(rng.below(256)),
                           static_cast<std::uint8_t>(rng.below(256))});
  return img;
}

inline rscm::BinaryMask rect_mask(int w, int h, int x0, int y0, int rw, int rh) {
  rscm::BinaryMask m(w, h);
  for (int y = y0; y < y0 + rh; ++y)
    for (int x = x0; x < x0 + rw; ++x) m.set(x, y);
  return m;
}

inline rscm::SourceInstance instance(rscm::BinaryMask mask, rscm::ObjectClass cls = rscm::ObjectClass::building,
                                     std::string id = "obj") {
  rscm::SourceInstance inst;
  inst.instance_id = std::move(id);
  inst.class_label = cls;
  inst.mask = std::move(mask);
  inst.image_id = "img";
  return inst;
}

inline std::filesystem::path scratch_root() {
  return std::filesystem::temp_directory_path() / ("rscm_test_" + std::to_string(getpid()));
}

// Removes the per-process root at exit unless RSCM_KEEP_SCRATCH is set.
struct ScratchCleanup {
  ~ScratchCleanup() {
    if (std::getenv("RSCM_KEEP_SCRATCH")) return;
    std::error_code ec;
    std::filesystem::remove_all(scratch_root(), ec);
  }
};
inline ScratchCleanup scratch_cleanup;

/// Fresh empty directory under a per-process temp root.
inline std::filesystem::path scratch_dir(const std::string& name) {
  const auto dir = scratch_root() / name;
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

}  // namespace testutil
