#include "rscm/raster.hpp"

namespace rscm {

BinaryMask diff_support(const RgbImage& a, const RgbImage& b) {
  if (a.size() != b.size()) throw Error(Errc::dimension_mismatch, "diff_support");
  const auto differs = (a.channels[0] != b.channels[0]) || (a.channels[1] != b.channels[1]) ||
                       (a.channels[2] != b.channels[2]);
  return BinaryMask::from_plane(differs.cast<std::uint8_t>());
}

}  // namespace rscm
