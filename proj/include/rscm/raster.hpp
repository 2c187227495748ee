#pragma once

#include <array>
#include <cstdint>

#include <Eigen/Core>

#include "rscm/error.hpp"

namespace rscm {

/// Row-major 2D plane; rows index y, columns index x.
template <typename Scalar>
using Plane = Eigen::Array<Scalar, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

using Point2d = Eigen::Vector2d;

struct ImageSize {
  int width = 0;
  int height = 0;
  friend bool operator==(const ImageSize&, const ImageSize&) = default;
};

/// Binary membership raster. Every stored value is 0 or 1.
class BinaryMask {
 public:
  BinaryMask() = default;
  BinaryMask(int width, int height) : bits_(Plane<std::uint8_t>::Zero(height, width)) {
    if (width <= 0 || height <= 0) {
      throw Error(Errc::bad_dimensions, "mask dimensions must be positive");
    }
  }
  explicit BinaryMask(ImageSize size) : BinaryMask(size.width, size.height) {}

  /// Any nonzero value becomes 1.
  template <typename Derived>
  static BinaryMask from_plane(const Eigen::ArrayBase<Derived>& plane) {
    BinaryMask mask(static_cast<int>(plane.cols()), static_cast<int>(plane.rows()));
    mask.bits_ = (plane != typename Derived::Scalar(0)).template cast<std::uint8_t>();
    return mask;
  }

  int width() const noexcept { return static_cast<int>(bits_.cols()); }
  int height() const noexcept { return static_cast<int>(bits_.rows()); }
  ImageSize size() const noexcept { return {width(), height()}; }
  bool empty_raster() const noexcept { return bits_.size() == 0; }

  bool operator()(int x, int y) const { return bits_(y, x) != 0; }
  void set(int x, int y, bool value = true) { bits_(y, x) = value ? 1 : 0; }

  bool contains(int x, int y) const noexcept {
    return x >= 0 && y >= 0 && x < width() && y < height();
  }

  std::int64_t count() const { return bits_.template cast<std::int64_t>().sum(); }
  bool any() const { return (bits_ != 0).any(); }

  const Plane<std::uint8_t>& bits() const noexcept { return bits_; }

  friend bool operator==(const BinaryMask& a, const BinaryMask& b) {
    return a.bits_.rows() == b.bits_.rows() && a.bits_.cols() == b.bits_.cols() &&
           (a.bits_ == b.bits_).all();
  }

 private:
  Plane<std::uint8_t> bits_;
};

/// Planar three-channel raster.
template <typename Scalar>
struct RgbRaster {
  std::array<Plane<Scalar>, 3> channels;

  RgbRaster() = default;
  RgbRaster(int width, int height) {
    for (auto& c : channels) c = Plane<Scalar>::Zero(height, width);
  }

  int width() const noexcept { return static_cast<int>(channels[0].cols()); }
  int height() const noexcept { return static_cast<int>(channels[0].rows()); }
  ImageSize size() const noexcept { return {width(), height()}; }

  std::array<Scalar, 3> pixel(int x, int y) const {
    return {channels[0](y, x), channels[1](y, x), channels[2](y, x)};
  }
  void set_pixel(int x, int y, const std::array<Scalar, 3>& rgb) {
    for (int c = 0; c < 3; ++c) channels[c](y, x) = rgb[c];
  }

  template <typename Other>
  RgbRaster<Other> cast() const {
    RgbRaster<Other> out;
    for (int c = 0; c < 3; ++c) out.channels[c] = channels[c].template cast<Other>();
    return out;
  }

  friend bool operator==(const RgbRaster& a, const RgbRaster& b) {
    if (a.size() != b.size()) return false;
    for (int c = 0; c < 3; ++c) {
      if (!(a.channels[c] == b.channels[c]).all()) return false;
    }
    return true;
  }
};

using RgbImage = RgbRaster<std::uint8_t>;

/// Mask of pixels where two images differ in any channel.
BinaryMask diff_support(const RgbImage& a, const RgbImage& b);

}  // namespace rscm
