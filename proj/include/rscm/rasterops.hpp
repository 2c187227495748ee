#pragma once

#include <cstdint>
#include <optional>
#include <string_view>

#include "rscm/raster.hpp"

namespace rscm {

struct BoundingBox {
  int min_x = 0;
  int min_y = 0;
  int max_x = 0;
  int max_y = 0;  // inclusive

  int width() const noexcept { return max_x - min_x + 1; }
  int height() const noexcept { return max_y - min_y + 1; }
  bool touches_border(ImageSize size) const noexcept {
    return min_x <= 0 || min_y <= 0 || max_x >= size.width - 1 || max_y >= size.height - 1;
  }
  friend bool operator==(const BoundingBox&, const BoundingBox&) = default;
};

struct RegionStats {
  std::int64_t area_px = 0;
  BoundingBox bbox;
  Point2d centroid = Point2d::Zero();
  int component_count = 0;
};

enum class GridCell {
  top_left,
  top,
  top_right,
  left,
  center,
  right,
  bottom_left,
  bottom,
  bottom_right,
};

/// Compass labels; y grows downward so north points toward smaller y.
enum class Direction8 {
  north,
  northeast,
  east,
  southeast,
  south,
  southwest,
  west,
  northwest,
};

std::string_view to_string(GridCell cell);
std::string_view to_string(Direction8 dir);
std::optional<GridCell> parse_grid_cell(std::string_view text);
std::optional<Direction8> parse_direction(std::string_view text);

Direction8 opposite(Direction8 dir);

/// Area, bounding box, centroid and 4-connected component count.
/// Throws Errc::empty_mask when no pixel is set.
RegionStats region_stats(const BinaryMask& mask);

/// Number of 4-connected components (0 for an empty mask).
int count_components(const BinaryMask& mask);

/// |a ∩ b| / |a|. The denominator is the first mask.
double overlap_fraction(const BinaryMask& a, const BinaryMask& b);

/// Cell (floor(3x/w), floor(3y/h)) clamped to the 3x3 grid.
GridCell grid_cell(const Point2d& point, ImageSize image);

/// Eight 45° sectors centred on the compass axes. An angle exactly on a sector
/// edge belongs to the clockwise-later sector.
Direction8 direction(const Point2d& from, const Point2d& to);

/// Euclidean distance divided by the image diagonal sqrt(w² + h²). Pixel
/// coordinates end at w-1, so opposite corner pixels give slightly under 1.
double normalized_distance(const Point2d& a, const Point2d& b, ImageSize image);

}  // namespace rscm
