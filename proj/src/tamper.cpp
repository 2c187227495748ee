#include "rscm/tamper.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/LU>

namespace rscm {

namespace {

constexpr std::array<std::string_view, 7> kClassNames = {
    "vehicle", "airplane", "ship", "building", "road", "tree", "farmland"};
constexpr std::array<std::string_view, 3> kBlurNames = {"gaussian", "mosaic", "daub"};

template <typename Enum, std::size_t N>
std::optional<Enum> parse_name(const std::array<std::string_view, N>& names, std::string_view text) {
  for (std::size_t i = 0; i < N; ++i) {
    if (names[i] == text) return static_cast<Enum>(i);
  }
  return std::nullopt;
}

std::uint8_t round_mean(std::int64_t sum, std::int64_t n) {
  return static_cast<std::uint8_t>((2 * sum + n) / (2 * n));
}

std::uint8_t round_to_byte(double v) {
  return static_cast<std::uint8_t>(std::clamp(std::floor(v + 0.5), 0.0, 255.0));
}

double bilinear(const Plane<std::uint8_t>& plane, const Point2d& q) {
  const int w = static_cast<int>(plane.cols());
  const int h = static_cast<int>(plane.rows());
  const double fx0 = std::floor(q.x());
  const double fy0 = std::floor(q.y());
  const double ax = q.x() - fx0;
  const double ay = q.y() - fy0;
  const auto cx = [w](double v) { return std::clamp(static_cast<int>(v), 0, w - 1); };
  const auto cy = [h](double v) { return std::clamp(static_cast<int>(v), 0, h - 1); };
  const int x0 = cx(fx0), x1 = cx(fx0 + 1), y0 = cy(fy0), y1 = cy(fy0 + 1);
  const double top = (1.0 - ax) * plane(y0, x0) + ax * plane(y0, x1);
  const double bottom = (1.0 - ax) * plane(y1, x0) + ax * plane(y1, x1);
  return (1.0 - ay) * top + ay * bottom;
}

struct SourceSummary {
  std::int64_t area = 0;
  Point2d centroid = Point2d::Zero();
};

SourceSummary summarize(const BinaryMask& mask) {
  SourceSummary s;
  double sx = 0.0, sy = 0.0;
  for (int y = 0; y < mask.height(); ++y) {
    for (int x = 0; x < mask.width(); ++x) {
      if (!mask(x, y)) continue;
      ++s.area;
      sx += x;
      sy += y;
    }
  }
  if (s.area > 0) s.centroid = Point2d(sx / s.area, sy / s.area);
  return s;
}

PlacementCheck evaluate(const SourceInstance& instance, const SourceSummary& src,
                        const Footprint& footprint, const Eigen::Vector2i& t,
                        const PlaceOptions& options) {
  PlacementCheck check;
  const BinaryMask& mask = instance.mask;
  const ImageSize size = mask.size();
  if (footprint.pixels.empty() || src.area == 0) return check;

  const bool road = instance.class_label == ObjectClass::road;
  std::int64_t both = 0;
  double sx = 0.0, sy = 0.0;
  for (const auto& p : footprint.pixels) {
    const int x = p.x() + t.x();
    const int y = p.y() + t.y();
    if (!mask.contains(x, y)) continue;
    ++check.visible_px;
    sx += x;
    sy += y;
    if (mask(x, y)) ++both;
  }
  const auto total = static_cast<std::int64_t>(footprint.pixels.size());
  if (road) {
    check.inside = check.visible_px > 0 &&
                   static_cast<double>(check.visible_px) >= options.min_road_visible * total;
  } else {
    const BoundingBox moved{footprint.bbox.min_x + t.x(), footprint.bbox.min_y + t.y(),
                            footprint.bbox.max_x + t.x(), footprint.bbox.max_y + t.y()};
    check.inside = check.visible_px == total && !moved.touches_border(size);
  }
  check.overlap = static_cast<double>(both) / static_cast<double>(src.area);
  bool distinct_centroid = false;
  if (check.visible_px > 0) {
    const Point2d c(sx / check.visible_px, sy / check.visible_px);
    distinct_centroid = c != src.centroid;
  }
  check.accepted = check.inside && check.overlap <= options.max_overlap && distinct_centroid;
  return check;
}

Eigen::Matrix2d rotation_matrix(double deg) {
  const double rad = deg * M_PI / 180.0;
  Eigen::Matrix2d r;
  r << std::cos(rad), -std::sin(rad), std::sin(rad), std::cos(rad);
  return r;
}

}  // namespace

std::string_view to_string(ObjectClass cls) { return kClassNames[static_cast<int>(cls)]; }
std::string_view to_string(TamperKind kind) {
  return kind == TamperKind::copy_move ? "copy_move" : "blur";
}
std::string_view to_string(BlurKind kind) { return kBlurNames[static_cast<int>(kind)]; }
std::string_view to_string(RejectReason reason) {
  switch (reason) {
    case RejectReason::too_small: return "too_small";
    case RejectReason::too_large: return "too_large";
    case RejectReason::fragmented: return "fragmented";
    case RejectReason::touches_border: return "touches_border";
  }
  return "unknown";
}

std::optional<ObjectClass> parse_object_class(std::string_view text) {
  return parse_name<ObjectClass>(kClassNames, text);
}
std::optional<BlurKind> parse_blur_kind(std::string_view text) {
  return parse_name<BlurKind>(kBlurNames, text);
}
std::optional<TamperKind> parse_tamper_kind(std::string_view text) {
  if (text == "copy_move") return TamperKind::copy_move;
  if (text == "blur") return TamperKind::blur;
  return std::nullopt;
}

Eligibility check_eligibility(const SourceInstance& instance, ImageSize image,
                              const AreaBounds& bounds) {
  if (instance.mask.size() != image) {
    throw Error(Errc::dimension_mismatch, "instance mask does not match image " + instance.instance_id);
  }
  const std::int64_t area = instance.mask.count();
  const double ratio = static_cast<double>(area) / (static_cast<double>(image.width) * image.height);
  if (area == 0 || ratio < bounds.min_ratio) return {RejectReason::too_small};
  if (ratio > bounds.max_ratio) return {RejectReason::too_large};
  const RegionStats stats = region_stats(instance.mask);
  if (stats.component_count != 1) return {RejectReason::fragmented};
  if (instance.class_label != ObjectClass::road && stats.bbox.touches_border(image)) {
    return {RejectReason::touches_border};
  }
  return {};
}

TamperParams sample_params(Rng& rng, TamperKind kind, const SamplerConfig& config) {
  TamperParams params;
  if (kind == TamperKind::copy_move) {
    params.scale = rng.bernoulli(config.unit_scale_probability)
                       ? 1.0
                       : rng.uniform(config.scale_min, config.scale_max);
    params.rotation_deg = rng.bernoulli(config.no_rotation_probability)
                              ? 0.0
                              : rng.uniform(config.rotation_min_deg, config.rotation_max_deg);
    return params;
  }
  const BlurKind blur = kBlurKinds[rng.below(kBlurKinds.size())];
  params.blur_kind = blur;
  switch (blur) {
    case BlurKind::gaussian:
      params.blur_strength = rng.uniform(config.gaussian_sigma_min, config.gaussian_sigma_max);
      break;
    case BlurKind::mosaic:
      params.blur_strength = config.mosaic_blocks[rng.below(config.mosaic_blocks.size())];
      break;
    case BlurKind::daub:
      params.blur_strength = config.daub_radius;
      break;
  }
  return params;
}

Footprint transform_footprint(const SourceInstance& instance, double scale, double rotation_deg) {
  if (!(scale > 0.0)) throw Error(Errc::invalid_record, "scale must be positive");
  const RegionStats stats = region_stats(instance.mask);
  const BinaryMask& mask = instance.mask;
  Footprint fp;
  fp.bbox = {std::numeric_limits<int>::max(), std::numeric_limits<int>::max(),
             std::numeric_limits<int>::min(), std::numeric_limits<int>::min()};
  const auto add = [&fp](int x, int y, const Point2d& q) {
    fp.pixels.emplace_back(x, y);
    fp.sources.push_back(q);
    fp.bbox.min_x = std::min(fp.bbox.min_x, x);
    fp.bbox.min_y = std::min(fp.bbox.min_y, y);
    fp.bbox.max_x = std::max(fp.bbox.max_x, x);
    fp.bbox.max_y = std::max(fp.bbox.max_y, y);
  };

  if (scale == 1.0 && rotation_deg == 0.0) {
    for (int y = stats.bbox.min_y; y <= stats.bbox.max_y; ++y) {
      for (int x = stats.bbox.min_x; x <= stats.bbox.max_x; ++x) {
        if (mask(x, y)) add(x, y, Point2d(x, y));
      }
    }
    return fp;
  }

  const Point2d c = stats.centroid;
  const Eigen::Matrix2d forward = scale * rotation_matrix(rotation_deg);
  const Eigen::Matrix2d inverse = forward.inverse();
  double lo_x = std::numeric_limits<double>::max(), lo_y = lo_x;
  double hi_x = std::numeric_limits<double>::lowest(), hi_y = hi_x;
  for (double cx : {stats.bbox.min_x - 0.5, stats.bbox.max_x + 0.5}) {
    for (double cy : {stats.bbox.min_y - 0.5, stats.bbox.max_y + 0.5}) {
      const Point2d d = c + forward * (Point2d(cx, cy) - c);
      lo_x = std::min(lo_x, d.x());
      lo_y = std::min(lo_y, d.y());
      hi_x = std::max(hi_x, d.x());
      hi_y = std::max(hi_y, d.y());
    }
  }
  for (int y = static_cast<int>(std::floor(lo_y)); y <= static_cast<int>(std::ceil(hi_y)); ++y) {
    for (int x = static_cast<int>(std::floor(lo_x)); x <= static_cast<int>(std::ceil(hi_x)); ++x) {
      const Point2d q = c + inverse * (Point2d(x, y) - c);
      const int nx = static_cast<int>(std::floor(q.x() + 0.5));
      const int ny = static_cast<int>(std::floor(q.y() + 0.5));
      if (mask.contains(nx, ny) && mask(nx, ny)) add(x, y, q);
    }
  }
  return fp;
}

PlacementCheck evaluate_translation(const SourceInstance& instance, const Footprint& footprint,
                                    const Eigen::Vector2i& translation,
                                    const PlaceOptions& options) {
  return evaluate(instance, summarize(instance.mask), footprint, translation, options);
}

std::optional<Placement> place(const SourceInstance& instance, const TamperParams& params,
                               ImageSize image, Rng& rng, const PlaceOptions& options) {
  if (instance.mask.size() != image) throw Error(Errc::dimension_mismatch, "place");
  if (options.max_attempts < 1) throw Error(Errc::config_error, "max_attempts must be >= 1");
  if (options.enforce_eligibility) {
    const Eligibility e = check_eligibility(instance, image, options.area);
    if (!e.eligible()) {
      throw Error(Errc::ineligible_instance,
                  instance.instance_id + ": " + std::string(to_string(*e.rejected)));
    }
  }
  const Footprint fp = transform_footprint(instance, params.scale, params.rotation_deg);
  if (fp.pixels.empty()) return std::nullopt;
  const SourceSummary src = summarize(instance.mask);

  // Translation ranges keep the footprint bbox inside the frame (one pixel
  // clear of the border) or, for roads, merely intersecting it.
  int lo_x, hi_x, lo_y, hi_y;
  if (instance.class_label == ObjectClass::road) {
    lo_x = -fp.bbox.max_x;
    hi_x = image.width - 1 - fp.bbox.min_x;
    lo_y = -fp.bbox.max_y;
    hi_y = image.height - 1 - fp.bbox.min_y;
  } else {
    lo_x = 1 - fp.bbox.min_x;
    hi_x = image.width - 2 - fp.bbox.max_x;
    lo_y = 1 - fp.bbox.min_y;
    hi_y = image.height - 2 - fp.bbox.max_y;
  }
  if (lo_x > hi_x || lo_y > hi_y) return std::nullopt;

  for (int attempt = 0; attempt < options.max_attempts; ++attempt) {
    const Eigen::Vector2i t(static_cast<int>(rng.between(lo_x, hi_x)),
                            static_cast<int>(rng.between(lo_y, hi_y)));
    if (!evaluate(instance, src, fp, t, options).accepted) continue;
    Placement placement;
    placement.translation = t;
    placement.footprint = BinaryMask(image);
    for (const auto& p : fp.pixels) {
      const int x = p.x() + t.x();
      const int y = p.y() + t.y();
      if (placement.footprint.contains(x, y)) placement.footprint.set(x, y);
    }
    return placement;
  }
  return std::nullopt;
}

CopyMoveResult apply_copy_move(const RgbImage& image, const SourceInstance& instance,
                               const TamperParams& params, const Placement& placement) {
  if (image.size() != instance.mask.size() || placement.footprint.size() != image.size()) {
    throw Error(Errc::dimension_mismatch, "apply_copy_move");
  }
  const Footprint fp = transform_footprint(instance, params.scale, params.rotation_deg);
  const Eigen::Vector2i& t = placement.translation;
  CopyMoveResult out{image, instance.mask, placement.footprint};
  for (std::size_t i = 0; i < fp.pixels.size(); ++i) {
    const int x = fp.pixels[i].x() + t.x();
    const int y = fp.pixels[i].y() + t.y();
    if (!placement.footprint.contains(x, y) || !placement.footprint(x, y)) continue;
    for (int c = 0; c < 3; ++c) {
      out.tampered.channels[c](y, x) = round_to_byte(bilinear(image.channels[c], fp.sources[i]));
    }
  }
  return out;
}

namespace {

void gaussian_region(RgbImage& out, const RgbImage& in, const BinaryMask& region,
                     const BoundingBox& box, double sigma) {
  const int radius = static_cast<int>(std::ceil(3.0 * sigma));
  const int x0 = std::max(0, box.min_x - radius);
  const int y0 = std::max(0, box.min_y - radius);
  const int x1 = std::min(in.width() - 1, box.max_x + radius);
  const int y1 = std::min(in.height() - 1, box.max_y + radius);
  const int w = x1 - x0 + 1;
  const int h = y1 - y0 + 1;

  Eigen::ArrayXd kernel(2 * radius + 1);
  for (int k = -radius; k <= radius; ++k) kernel(k + radius) = std::exp(-(k * k) / (2.0 * sigma * sigma));

  // Normalized convolution: blur(I*M) / blur(M) keeps outside pixels out of the support.
  const auto separable = [&](const Plane<double>& src) {
    Plane<double> tmp = Plane<double>::Zero(h, w);
    for (int y = 0; y < h; ++y) {
      for (int x = 0; x < w; ++x) {
        double acc = 0.0;
        for (int k = -radius; k <= radius; ++k) {
          const int xx = x + k;
          if (xx >= 0 && xx < w) acc += kernel(k + radius) * src(y, xx);
        }
        tmp(y, x) = acc;
      }
    }
    Plane<double> res = Plane<double>::Zero(h, w);
    for (int y = 0; y < h; ++y) {
      for (int x = 0; x < w; ++x) {
        double acc = 0.0;
        for (int k = -radius; k <= radius; ++k) {
          const int yy = y + k;
          if (yy >= 0 && yy < h) acc += kernel(k + radius) * tmp(yy, x);
        }
        res(y, x) = acc;
      }
    }
    return res;
  };

  const Plane<double> weight = region.bits().block(y0, x0, h, w).cast<double>();
  const Plane<double> norm = separable(weight);
  for (int c = 0; c < 3; ++c) {
    const Plane<double> masked = in.channels[c].block(y0, x0, h, w).cast<double>() * weight;
    const Plane<double> num = separable(masked);
    for (int y = box.min_y; y <= box.max_y; ++y) {
      for (int x = box.min_x; x <= box.max_x; ++x) {
        if (!region(x, y)) continue;
        out.channels[c](y, x) = round_to_byte(num(y - y0, x - x0) / norm(y - y0, x - x0));
      }
    }
  }
}

void mosaic_region(RgbImage& out, const RgbImage& in, const BinaryMask& region,
                   const BoundingBox& box, int block) {
  for (int by = (box.min_y / block) * block; by <= box.max_y; by += block) {
    for (int bx = (box.min_x / block) * block; bx <= box.max_x; bx += block) {
      const int ey = std::min(by + block, in.height());
      const int ex = std::min(bx + block, in.width());
      std::array<std::int64_t, 3> sum{};
      std::int64_t n = 0;
      for (int y = by; y < ey; ++y) {
        for (int x = bx; x < ex; ++x) {
          if (!region(x, y)) continue;
          ++n;
          for (int c = 0; c < 3; ++c) sum[c] += in.channels[c](y, x);
        }
      }
      if (n == 0) continue;
      const std::array<std::uint8_t, 3> mean = {round_mean(sum[0], n), round_mean(sum[1], n),
                                                round_mean(sum[2], n)};
      for (int y = by; y < ey; ++y) {
        for (int x = bx; x < ex; ++x) {
          if (region(x, y)) out.set_pixel(x, y, mean);
        }
      }
    }
  }
}

void daub_region(RgbImage& out, const RgbImage& in, const BinaryMask& region,
                 const BoundingBox& box, int radius) {
  constexpr int kBins = 8;
  for (int y = box.min_y; y <= box.max_y; ++y) {
    for (int x = box.min_x; x <= box.max_x; ++x) {
      if (!region(x, y)) continue;
      std::array<std::int64_t, kBins> counts{};
      std::array<std::array<std::int64_t, 3>, kBins> sums{};
      for (int yy = std::max(0, y - radius); yy <= std::min(in.height() - 1, y + radius); ++yy) {
        for (int xx = std::max(0, x - radius); xx <= std::min(in.width() - 1, x + radius); ++xx) {
          if (!region(xx, yy)) continue;
          const auto px = in.pixel(xx, yy);
          const int intensity = (px[0] + px[1] + px[2]) / 3;
          const int bin = intensity * kBins / 256;
          ++counts[bin];
          for (int c = 0; c < 3; ++c) sums[bin][c] += px[c];
        }
      }
      const int best = static_cast<int>(std::max_element(counts.begin(), counts.end()) - counts.begin());
      const std::int64_t n = counts[best];
      out.set_pixel(x, y, {round_mean(sums[best][0], n), round_mean(sums[best][1], n),
                           round_mean(sums[best][2], n)});
    }
  }
}

}  // namespace

BlurResult apply_blur(const RgbImage& image, const SourceInstance& instance, BlurKind kind,
                      double strength) {
  if (image.size() != instance.mask.size()) throw Error(Errc::dimension_mismatch, "apply_blur");
  const RegionStats stats = region_stats(instance.mask);
  BlurResult out{image, instance.mask};
  switch (kind) {
    case BlurKind::gaussian:
      if (!(strength > 0.0)) throw Error(Errc::invalid_record, "gaussian sigma must be positive");
      gaussian_region(out.tampered, image, instance.mask, stats.bbox, strength);
      break;
    case BlurKind::mosaic:
      if (strength < 1.0) throw Error(Errc::invalid_record, "mosaic block must be >= 1");
      mosaic_region(out.tampered, image, instance.mask, stats.bbox, static_cast<int>(strength));
      break;
    case BlurKind::daub:
      if (strength < 1.0) throw Error(Errc::invalid_record, "daub radius must be >= 1");
      daub_region(out.tampered, image, instance.mask, stats.bbox, static_cast<int>(strength));
      break;
    default:
      throw Error(Errc::unknown_blur_kind, std::to_string(static_cast<int>(kind)));
  }
  return out;
}

BlurResult apply_blur(const RgbImage& image, const SourceInstance& instance,
                      std::string_view kind, double strength) {
  const auto parsed = parse_blur_kind(kind);
  if (!parsed) throw Error(Errc::unknown_blur_kind, std::string(kind));
  return apply_blur(image, instance, *parsed, strength);
}

std::optional<TamperOutcome> tamper_copy_move(const RgbImage& image,
                                              const SourceInstance& instance, Rng& rng,
                                              const SamplerConfig& sampler,
                                              const PlaceOptions& options) {
  TamperParams params = sample_params(rng, TamperKind::copy_move, sampler);
  auto placement = place(instance, params, image.size(), rng, options);
  if (!placement) return std::nullopt;
  params.translation = placement->translation;
  CopyMoveResult result = apply_copy_move(image, instance, params, *placement);
  TamperOutcome outcome;
  outcome.record.image_id = instance.image_id;
  outcome.record.instance = instance;
  outcome.record.params = params;
  outcome.record.kind = TamperKind::copy_move;
  outcome.record.degenerate = !(diff_support(image, result.tampered).bits() != 0).any();
  outcome.record.src_mask = std::move(result.src_mask);
  outcome.record.tmp_mask = std::move(result.tmp_mask);
  outcome.tampered = std::move(result.tampered);
  return outcome;
}

TamperOutcome tamper_blur(const RgbImage& image, const SourceInstance& instance, Rng& rng,
                          const SamplerConfig& sampler) {
  const TamperParams params = sample_params(rng, TamperKind::blur, sampler);
  BlurResult result = apply_blur(image, instance, *params.blur_kind, params.blur_strength);
  TamperOutcome outcome;
  outcome.record.image_id = instance.image_id;
  outcome.record.instance = instance;
  outcome.record.params = params;
  outcome.record.kind = TamperKind::blur;
  outcome.record.degenerate = !(diff_support(image, result.tampered).bits() != 0).any();
  outcome.record.src_mask = result.region_mask;
  outcome.record.tmp_mask = std::move(result.region_mask);
  outcome.tampered = std::move(result.tampered);
  return outcome;
}

}  // namespace rscm
