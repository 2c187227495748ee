#include "rscm/rasterops.hpp"

#include <array>
#include <cmath>
#include <vector>

namespace rscm {

namespace {

constexpr std::array<std::string_view, 9> kCellNames = {
    "top-left", "top", "top-right", "left", "center", "right",
    "bottom-left", "bottom", "bottom-right"};

constexpr std::array<std::string_view, 8> kDirectionNames = {
    "north", "northeast", "east", "southeast", "south", "southwest", "west", "northwest"};

// Counter-clockwise sector index from east (0 = east, 2 = north) to label.
constexpr std::array<Direction8, 8> kSectorToDirection = {
    Direction8::east,  Direction8::northeast, Direction8::north, Direction8::northwest,
    Direction8::west,  Direction8::southwest, Direction8::south, Direction8::southeast};

void require_in_bounds(const Point2d& p, ImageSize image) {
  if (!(p.x() >= 0.0 && p.y() >= 0.0 && p.x() < image.width && p.y() < image.height)) {
    throw Error(Errc::out_of_bounds, "point outside image");
  }
}

}  // namespace

std::string_view to_string(GridCell cell) { return kCellNames[static_cast<int>(cell)]; }
std::string_view to_string(Direction8 dir) { return kDirectionNames[static_cast<int>(dir)]; }

std::optional<GridCell> parse_grid_cell(std::string_view text) {
  for (std::size_t i = 0; i < kCellNames.size(); ++i) {
    if (kCellNames[i] == text) return static_cast<GridCell>(i);
  }
  return std::nullopt;
}

std::optional<Direction8> parse_direction(std::string_view text) {
  for (std::size_t i = 0; i < kDirectionNames.size(); ++i) {
    if (kDirectionNames[i] == text) return static_cast<Direction8>(i);
  }
  return std::nullopt;
}

Direction8 opposite(Direction8 dir) { return static_cast<Direction8>((static_cast<int>(dir) + 4) % 8); }

int count_components(const BinaryMask& mask) {
  const int w = mask.width();
  const int h = mask.height();
  std::vector<std::uint8_t> seen(static_cast<std::size_t>(w) * h, 0);
  std::vector<int> stack;
  int components = 0;
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      const std::size_t idx = static_cast<std::size_t>(y) * w + x;
      if (!mask(x, y) || seen[idx]) continue;
      ++components;
      seen[idx] = 1;
      stack.push_back(static_cast<int>(idx));
      while (!stack.empty()) {
        const int cur = stack.back();
        stack.pop_back();
        const int cx = cur % w;
        const int cy = cur / w;
        const std::array<std::array<int, 2>, 4> nbrs = {{{cx - 1, cy}, {cx + 1, cy}, {cx, cy - 1}, {cx, cy + 1}}};
        for (const auto& [nx, ny] : nbrs) {
          if (!mask.contains(nx, ny) || !mask(nx, ny)) continue;
          const std::size_t nidx = static_cast<std::size_t>(ny) * w + nx;
          if (seen[nidx]) continue;
          seen[nidx] = 1;
          stack.push_back(static_cast<int>(nidx));
        }
      }
    }
  }
  return components;
}

RegionStats region_stats(const BinaryMask& mask) {
  RegionStats stats;
  stats.bbox = {mask.width(), mask.height(), -1, -1};
  double sum_x = 0.0;
  double sum_y = 0.0;
  for (int y = 0; y < mask.height(); ++y) {
    for (int x = 0; x < mask.width(); ++x) {
      if (!mask(x, y)) continue;
      ++stats.area_px;
      sum_x += x;
      sum_y += y;
      stats.bbox.min_x = std::min(stats.bbox.min_x, x);
      stats.bbox.min_y = std::min(stats.bbox.min_y, y);
      stats.bbox.max_x = std::max(stats.bbox.max_x, x);
      stats.bbox.max_y = std::max(stats.bbox.max_y, y);
    }
  }
  if (stats.area_px == 0) throw Error(Errc::empty_mask, "region_stats on empty mask");
  const auto n = static_cast<double>(stats.area_px);
  stats.centroid = Point2d(sum_x / n, sum_y / n);
  stats.component_count = count_components(mask);
  return stats;
}

double overlap_fraction(const BinaryMask& a, const BinaryMask& b) {
  if (a.size() != b.size()) throw Error(Errc::dimension_mismatch, "overlap_fraction");
  const std::int64_t area = a.count();
  if (area == 0) throw Error(Errc::empty_mask, "overlap_fraction denominator mask is empty");
  const std::int64_t both =
      ((a.bits() != 0) && (b.bits() != 0)).cast<std::int64_t>().sum();
  return static_cast<double>(both) / static_cast<double>(area);
}

GridCell grid_cell(const Point2d& point, ImageSize image) {
  require_in_bounds(point, image);
  const auto axis = [](double v, int extent) {
    const int idx = static_cast<int>(std::floor(3.0 * v / extent));
    return std::clamp(idx, 0, 2);
  };
  return static_cast<GridCell>(axis(point.y(), image.height) * 3 + axis(point.x(), image.width));
}

Direction8 direction(const Point2d& from, const Point2d& to) {
  const double dx = to.x() - from.x();
  const double dy_up = from.y() - to.y();
  if (dx == 0.0 && dy_up == 0.0) throw Error(Errc::coincident_points, "direction");
  const double deg = std::atan2(dy_up, dx) * 180.0 / M_PI;
  // Sector k covers (45k - 22.5, 45k + 22.5]; the upper edge is clockwise-later.
  int k = static_cast<int>(std::ceil((deg - 22.5) / 45.0));
  k = ((k % 8) + 8) % 8;
  return kSectorToDirection[k];
}

double normalized_distance(const Point2d& a, const Point2d& b, ImageSize image) {
  require_in_bounds(a, image);
  require_in_bounds(b, image);
  const double diag = std::hypot(static_cast<double>(image.width), static_cast<double>(image.height));
  return (a - b).norm() / diag;
}

}  // namespace rscm
