#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "rscm/raster.hpp"
#include "rscm/rasterops.hpp"
#include "rscm/rng.hpp"

namespace rscm {

enum class ObjectClass { vehicle, airplane, ship, building, road, tree, farmland };

inline constexpr std::array<ObjectClass, 7> kObjectClasses = {
    ObjectClass::vehicle, ObjectClass::airplane, ObjectClass::ship, ObjectClass::building,
    ObjectClass::road,    ObjectClass::tree,     ObjectClass::farmland};

enum class TamperKind { copy_move, blur };
enum class BlurKind { gaussian, mosaic, daub };

inline constexpr std::array<BlurKind, 3> kBlurKinds = {BlurKind::gaussian, BlurKind::mosaic,
                                                       BlurKind::daub};

std::string_view to_string(ObjectClass cls);
std::string_view to_string(TamperKind kind);
std::string_view to_string(BlurKind kind);
std::optional<ObjectClass> parse_object_class(std::string_view text);
std::optional<TamperKind> parse_tamper_kind(std::string_view text);
std::optional<BlurKind> parse_blur_kind(std::string_view text);

struct SourceInstance {
  std::string instance_id;
  ObjectClass class_label = ObjectClass::building;
  BinaryMask mask;
  std::string image_id;
};

struct AreaBounds {
  double min_ratio = 0.001;
  double max_ratio = 0.15;  // both ends inclusive
};

enum class RejectReason { too_small, too_large, fragmented, touches_border };
std::string_view to_string(RejectReason reason);

struct Eligibility {
  std::optional<RejectReason> rejected;
  bool eligible() const noexcept { return !rejected.has_value(); }
};

/// Area ratio within bounds, a single 4-connected component, and (except for
/// roads) a bounding box clear of the image border.
Eligibility check_eligibility(const SourceInstance& instance, ImageSize image,
                              const AreaBounds& bounds = {});

struct TamperParams {
  double scale = 1.0;
  double rotation_deg = 0.0;
  Eigen::Vector2i translation = Eigen::Vector2i::Zero();
  std::optional<BlurKind> blur_kind;
  /// gaussian: sigma; mosaic: block edge in pixels; daub: neighbourhood radius.
  double blur_strength = 0.0;

  friend bool operator==(const TamperParams&, const TamperParams&) = default;
};

struct SamplerConfig {
  double unit_scale_probability = 1.0 / 3.0;
  double scale_min = 0.5;
  double scale_max = 1.5;
  double no_rotation_probability = 0.5;
  double rotation_min_deg = 5.0;
  double rotation_max_deg = 355.0;
  double gaussian_sigma_min = 2.0;
  double gaussian_sigma_max = 6.0;
  std::vector<int> mosaic_blocks = {8, 16, 32};
  int daub_radius = 4;
};

TamperParams sample_params(Rng& rng, TamperKind kind, const SamplerConfig& config = {});

/// Instance mask after scale and rotation about its centroid, before translation.
/// Each destination pixel carries the source-image position it samples.
struct Footprint {
  std::vector<Eigen::Vector2i> pixels;
  std::vector<Point2d> sources;
  BoundingBox bbox;
};

Footprint transform_footprint(const SourceInstance& instance, double scale, double rotation_deg);

struct PlaceOptions {
  int max_attempts = 100;
  double max_overlap = 0.05;
  /// Roads may be clipped by the frame, keeping at least this share of the footprint.
  double min_road_visible = 0.5;
  /// Disabled only to exercise geometry on instances that would fail eligibility.
  bool enforce_eligibility = true;
  AreaBounds area;
};

struct PlacementCheck {
  bool accepted = false;
  bool inside = false;
  double overlap = 0.0;
  std::int64_t visible_px = 0;
};

/// Evaluates one candidate translation against the containment and overlap rules.
PlacementCheck evaluate_translation(const SourceInstance& instance, const Footprint& footprint,
                                    const Eigen::Vector2i& translation,
                                    const PlaceOptions& options = {});

struct Placement {
  Eigen::Vector2i translation = Eigen::Vector2i::Zero();
  BinaryMask footprint;
};

/// Random constrained placement; std::nullopt after max_attempts rejected draws.
std::optional<Placement> place(const SourceInstance& instance, const TamperParams& params,
                               ImageSize image, Rng& rng, const PlaceOptions& options = {});

struct CopyMoveResult {
  RgbImage tampered;
  BinaryMask src_mask;
  BinaryMask tmp_mask;
};

/// Pastes the transformed patch (bilinear RGB) onto the placement footprint.
CopyMoveResult apply_copy_move(const RgbImage& image, const SourceInstance& instance,
                               const TamperParams& params, const Placement& placement);

struct BlurResult {
  RgbImage tampered;
  BinaryMask region_mask;
};

/// In-place region blur. Filters read only pixels inside the instance mask.
BlurResult apply_blur(const RgbImage& image, const SourceInstance& instance, BlurKind kind,
                      double strength);
/// Throws UnknownBlurKind for names outside {gaussian, mosaic, daub}.
BlurResult apply_blur(const RgbImage& image, const SourceInstance& instance,
                      std::string_view kind, double strength);

struct TamperRecord {
  std::string record_id;
  std::string image_id;
  SourceInstance instance;
  TamperParams params;
  BinaryMask src_mask;
  BinaryMask tmp_mask;
  TamperKind kind = TamperKind::copy_move;
  /// No pixel inside tmp_mask changed.
  bool degenerate = false;
};

struct TamperOutcome {
  TamperRecord record;
  RgbImage tampered;
};

/// Sample, place and composite one copy-move event. std::nullopt when no placement fits.
std::optional<TamperOutcome> tamper_copy_move(const RgbImage& image,
                                              const SourceInstance& instance, Rng& rng,
                                              const SamplerConfig& sampler = {},
                                              const PlaceOptions& options = {});

TamperOutcome tamper_blur(const RgbImage& image, const SourceInstance& instance, Rng& rng,
                          const SamplerConfig& sampler = {});

}  // namespace rscm
