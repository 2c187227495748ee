#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "rscm/rasterops.hpp"
#include "rscm/tamper.hpp"

namespace rscm {

enum class DatasetKind { cmqa, tqa };
enum class QuestionCategory { basic, independent, related };
enum class ItemKind { copy_move, blur, untampered };

/// The fact a template interrogates; decouples question ids from answer logic.
enum class FactKey {
  tampered,
  object_class,
  scene_theme,
  tamper_type,
  tmp_cell,
  tmp_size,
  src_cell,
  src_size,
  tmp_touches_border,
  class_unique,
  direction,
  distance,
  size_relation,
  overlapping,
  rotated,
};

std::string_view to_string(DatasetKind kind);
std::string_view to_string(QuestionCategory category);
std::string_view to_string(ItemKind kind);
std::string_view to_string(FactKey key);
std::optional<DatasetKind> parse_dataset_kind(std::string_view text);
std::optional<QuestionCategory> parse_category(std::string_view text);
std::optional<ItemKind> parse_item_kind(std::string_view text);
std::optional<FactKey> parse_fact_key(std::string_view text);

struct QuestionTemplate {
  int qid = 0;
  QuestionCategory category = QuestionCategory::basic;
  FactKey fact = FactKey::tampered;
  std::string text_pattern;
  std::vector<std::string> answer_domain;
  std::vector<ItemKind> applicability;

  bool applies_to(ItemKind kind) const;
  bool accepts(std::string_view answer) const;
};

/// Bin edges for size and distance answers, and the scale band read as "unchanged".
struct AnswerThresholds {
  std::array<double, 3> size_bins = {0.005, 0.02, 0.08};
  std::array<double, 3> distance_bins = {0.05, 0.2, 0.45};
  double enlarged_above = 1.05;
  double shrunk_below = 0.95;
};

struct Registry {
  DatasetKind kind = DatasetKind::cmqa;
  AnswerThresholds thresholds;
  std::vector<QuestionTemplate> templates;

  const QuestionTemplate* find(int qid) const;
  const QuestionTemplate& at(int qid) const;  // throws UnknownQid
  std::size_t count(QuestionCategory category) const;
};

/// 14 templates for cmqa; tqa adds the tamper-type question as qid 4.
Registry default_registry(DatasetKind kind);

nlohmann::json registry_to_json(const Registry& registry);
/// Validates unique qids and non-empty answer domains. Throws ParseError.
Registry registry_from_json(const nlohmann::json& doc);
Registry load_registry(const std::filesystem::path& path);
void save_registry(const std::filesystem::path& path, const Registry& registry);

/// Distinct answers over all templates in registry order.
std::vector<std::string> answer_vocabulary(const Registry& registry);

enum class SizeBin { tiny, small, medium, large };
enum class DistanceBin { adjacent, near, medium, far };
enum class SizeRelation { enlarged, shrunk, unchanged };

std::string_view to_string(SizeBin bin);
std::string_view to_string(DistanceBin bin);
std::string_view to_string(SizeRelation relation);

SizeBin size_bin(double area_ratio, const AnswerThresholds& t);
DistanceBin distance_bin(double normalized_distance, const AnswerThresholds& t);
SizeRelation size_relation(double scale, const AnswerThresholds& t);
/// "copy-move", "gaussian-blur", "mosaic-blur", "daub" or "none".
std::string tamper_type_label(ItemKind kind, std::optional<BlurKind> blur);

/// Item metadata that does not live in the masks.
struct ItemContext {
  std::optional<std::string> theme;
  /// Instances of the tampered object's class in the original image.
  int class_instance_count = 1;
};

struct FactSheet {
  ItemKind item_kind = ItemKind::untampered;
  bool tampered = false;
  std::string tamper_type = "none";
  std::optional<ObjectClass> object_class;
  std::optional<std::string> theme;
  std::optional<GridCell> tmp_cell;
  std::optional<GridCell> src_cell;
  std::optional<SizeBin> tmp_size;
  std::optional<SizeBin> src_size;
  std::optional<bool> tmp_touches_border;
  std::optional<bool> class_unique;
  // Source-versus-tampering relations; copy-move only.
  std::optional<Direction8> direction_src_to_tmp;
  std::optional<DistanceBin> distance;
  std::optional<SizeRelation> size_relation;
  std::optional<bool> rotated;
  std::optional<bool> overlapping;
};

/// Throws InvalidRecord when masks are empty, mismatched, or inconsistent with the kind.
FactSheet derive_facts(const TamperRecord& record, const ItemContext& context,
                       const AnswerThresholds& thresholds);
FactSheet untampered_facts(const ItemContext& context);

std::optional<std::string> answer_for(const FactSheet& facts, FactKey key);

/// Replaces "{object}" with the object class. Throws MissingSlot.
std::string render_text(const QuestionTemplate& tmpl, const FactSheet& facts);

struct Triple {
  std::string triple_id;
  std::string image_id;
  int qid = 0;
  QuestionCategory category = QuestionCategory::basic;
  std::string question_text;
  std::string answer;

  friend bool operator==(const Triple&, const Triple&) = default;
};

/// First 16 hex digits of sha256("<image_id>#<qid>").
std::string make_triple_id(std::string_view image_id, int qid);

/// One triple per applicable template, in qid order. Blur items require a tqa
/// registry. Throws TemplateGap or InvalidRecord.
std::vector<Triple> synthesize(const FactSheet& facts, std::string_view image_id,
                               const Registry& registry);

}  // namespace rscm
