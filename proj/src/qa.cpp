#include "rscm/qa.hpp"

#include <algorithm>
#include <fstream>
#include <set>

#include "rscm/hash.hpp"

namespace rscm {

namespace {

using nlohmann::json;

constexpr std::array<std::string_view, 15> kFactNames = {
    "tampered",    "object_class", "scene_theme",        "tamper_type",  "tmp_cell",
    "tmp_size",    "src_cell",     "src_size",           "tmp_touches_border", "class_unique",
    "direction",   "distance",     "size_relation",      "overlapping",  "rotated"};
constexpr std::array<std::string_view, 3> kCategoryNames = {"basic", "independent", "related"};
constexpr std::array<std::string_view, 3> kItemKindNames = {"copy_move", "blur", "untampered"};
constexpr std::array<std::string_view, 4> kSizeNames = {"tiny", "small", "medium", "large"};
constexpr std::array<std::string_view, 4> kDistanceNames = {"adjacent", "near", "medium", "far"};
constexpr std::array<std::string_view, 3> kRelationNames = {"enlarged", "shrunk", "unchanged"};

const std::vector<std::string> kThemes = {
    "urban",    "suburban", "rural",  "industrial", "residential",
    "commercial", "harbor", "airport", "forest",    "agricultural",
    "water",    "desert",   "mountain", "coastal",  "park"};

template <typename Enum, std::size_t N>
std::optional<Enum> parse_name(const std::array<std::string_view, N>& names, std::string_view text) {
  for (std::size_t i = 0; i < N; ++i) {
    if (names[i] == text) return static_cast<Enum>(i);
  }
  return std::nullopt;
}

template <typename Range>
std::vector<std::string> names_of(const Range& values) {
  std::vector<std::string> out;
  for (const auto& v : values) out.emplace_back(to_string(v));
  return out;
}

std::vector<std::string> yes_no() { return {"yes", "no"}; }
std::string yes_no(bool v) { return v ? "yes" : "no"; }

std::vector<std::string> all_cells() {
  std::vector<std::string> out;
  for (int i = 0; i < 9; ++i) out.emplace_back(to_string(static_cast<GridCell>(i)));
  return out;
}

std::vector<std::string> all_directions() {
  std::vector<std::string> out;
  for (int i = 0; i < 8; ++i) out.emplace_back(to_string(static_cast<Direction8>(i)));
  return out;
}

template <std::size_t N>
std::vector<std::string> to_vector(const std::array<std::string_view, N>& names) {
  return {names.begin(), names.end()};
}

}  // namespace

std::string_view to_string(DatasetKind kind) { return kind == DatasetKind::cmqa ? "cmqa" : "tqa"; }
std::string_view to_string(QuestionCategory c) { return kCategoryNames[static_cast<int>(c)]; }
std::string_view to_string(ItemKind kind) { return kItemKindNames[static_cast<int>(kind)]; }
std::string_view to_string(FactKey key) { return kFactNames[static_cast<int>(key)]; }
std::string_view to_string(SizeBin bin) { return kSizeNames[static_cast<int>(bin)]; }
std::string_view to_string(DistanceBin bin) { return kDistanceNames[static_cast<int>(bin)]; }
std::string_view to_string(SizeRelation r) { return kRelationNames[static_cast<int>(r)]; }

std::optional<DatasetKind> parse_dataset_kind(std::string_view text) {
  if (text == "cmqa") return DatasetKind::cmqa;
  if (text == "tqa") return DatasetKind::tqa;
  return std::nullopt;
}
std::optional<QuestionCategory> parse_category(std::string_view text) {
  return parse_name<QuestionCategory>(kCategoryNames, text);
}
std::optional<ItemKind> parse_item_kind(std::string_view text) {
  return parse_name<ItemKind>(kItemKindNames, text);
}
std::optional<FactKey> parse_fact_key(std::string_view text) {
  return parse_name<FactKey>(kFactNames, text);
}

bool QuestionTemplate::applies_to(ItemKind kind) const {
  return std::find(applicability.begin(), applicability.end(), kind) != applicability.end();
}

bool QuestionTemplate::accepts(std::string_view answer) const {
  return std::find(answer_domain.begin(), answer_domain.end(), answer) != answer_domain.end();
}

const QuestionTemplate* Registry::find(int qid) const {
  for (const auto& t : templates) {
    if (t.qid == qid) return &t;
  }
  return nullptr;
}

const QuestionTemplate& Registry::at(int qid) const {
  const QuestionTemplate* t = find(qid);
  if (t == nullptr) throw Error(Errc::unknown_qid, std::to_string(qid));
  return *t;
}

std::size_t Registry::count(QuestionCategory category) const {
  return static_cast<std::size_t>(std::count_if(
      templates.begin(), templates.end(), [category](const auto& t) { return t.category == category; }));
}

Registry default_registry(DatasetKind kind) {
  using IK = ItemKind;
  using QC = QuestionCategory;
  const std::vector<IK> any_tamper = {IK::copy_move, IK::blur};
  const std::vector<IK> copy_only = {IK::copy_move};

  std::vector<QuestionTemplate> list = {
      {0, QC::basic, FactKey::tampered, "Has this image been tampered with?", yes_no(),
       {IK::copy_move, IK::blur, IK::untampered}},
      {0, QC::basic, FactKey::object_class, "What type of object has been tampered with?",
       names_of(kObjectClasses), any_tamper},
      {0, QC::basic, FactKey::scene_theme, "What is the scene type of this image?", kThemes,
       any_tamper},
      {0, QC::independent, FactKey::tmp_cell,
       "Where in the image is the tampering region of the {object}?", all_cells(), any_tamper},
      {0, QC::independent, FactKey::tmp_size, "How large is the tampering region of the {object}?",
       to_vector(kSizeNames), any_tamper},
      {0, QC::independent, FactKey::src_cell,
       "Where in the image is the source region of the copied {object}?", all_cells(), copy_only},
      {0, QC::independent, FactKey::src_size, "How large is the source region of the copied {object}?",
       to_vector(kSizeNames), copy_only},
      {0, QC::independent, FactKey::tmp_touches_border,
       "Does the tampering region touch the image border?", yes_no(), any_tamper},
      {0, QC::independent, FactKey::class_unique,
       "Is the tampered {object} the only {object} in the original image?", yes_no(), any_tamper},
      {0, QC::related, FactKey::direction,
       "In which direction does the tampering region lie from the source region?", all_directions(),
       copy_only},
      {0, QC::related, FactKey::distance, "How far is the tampering region from the source region?",
       to_vector(kDistanceNames), copy_only},
      {0, QC::related, FactKey::size_relation,
       "How has the size of the copied {object} changed?", to_vector(kRelationNames), copy_only},
      {0, QC::related, FactKey::overlapping, "Do the source and tampering regions overlap?", yes_no(),
       copy_only},
      {0, QC::related, FactKey::rotated, "Has the copied {object} been rotated?", yes_no(), copy_only},
  };
  if (kind == DatasetKind::tqa) {
    const QuestionTemplate type{0, QC::basic, FactKey::tamper_type, "What is the type of image tampering?",
                                {"copy-move", "gaussian-blur", "mosaic-blur", "daub"}, any_tamper};
    list.insert(list.begin() + 3, type);
  }
  for (std::size_t i = 0; i < list.size(); ++i) list[i].qid = static_cast<int>(i) + 1;
  return Registry{kind, AnswerThresholds{}, std::move(list)};
}

nlohmann::json registry_to_json(const Registry& registry) {
  json doc;
  doc["kind"] = to_string(registry.kind);
  doc["thresholds"] = {
      {"size_bins", registry.thresholds.size_bins},
      {"distance_bins", registry.thresholds.distance_bins},
      {"enlarged_above", registry.thresholds.enlarged_above},
      {"shrunk_below", registry.thresholds.shrunk_below},
  };
  json templates = json::array();
  for (const auto& t : registry.templates) {
    std::vector<std::string> applies;
    for (auto k : t.applicability) applies.emplace_back(to_string(k));
    templates.push_back({{"qid", t.qid},
                         {"category", to_string(t.category)},
                         {"fact", to_string(t.fact)},
                         {"text", t.text_pattern},
                         {"answers", t.answer_domain},
                         {"applies_to", applies}});
  }
  doc["templates"] = std::move(templates);
  return doc;
}

Registry registry_from_json(const nlohmann::json& doc) {
  try {
    Registry reg;
    const auto kind = parse_dataset_kind(doc.at("kind").get<std::string>());
    if (!kind) throw Error(Errc::parse_error, "registry: unknown kind");
    reg.kind = *kind;
    if (doc.contains("thresholds")) {
      const auto& t = doc.at("thresholds");
      reg.thresholds.size_bins = t.at("size_bins").get<std::array<double, 3>>();
      reg.thresholds.distance_bins = t.at("distance_bins").get<std::array<double, 3>>();
      reg.thresholds.enlarged_above = t.at("enlarged_above").get<double>();
      reg.thresholds.shrunk_below = t.at("shrunk_below").get<double>();
    }
    std::set<int> seen;
    for (const auto& item : doc.at("templates")) {
      QuestionTemplate t;
      t.qid = item.at("qid").get<int>();
      const auto category = parse_category(item.at("category").get<std::string>());
      const auto fact = parse_fact_key(item.at("fact").get<std::string>());
      if (!category || !fact) throw Error(Errc::parse_error, "registry: bad category or fact");
      t.category = *category;
      t.fact = *fact;
      t.text_pattern = item.at("text").get<std::string>();
      t.answer_domain = item.at("answers").get<std::vector<std::string>>();
      for (const auto& a : item.at("applies_to")) {
        const auto k = parse_item_kind(a.get<std::string>());
        if (!k) throw Error(Errc::parse_error, "registry: bad applies_to entry");
        t.applicability.push_back(*k);
      }
      if (t.answer_domain.empty()) {
        throw Error(Errc::parse_error, "registry: empty answer domain for qid " + std::to_string(t.qid));
      }
      if (!seen.insert(t.qid).second) {
        throw Error(Errc::parse_error, "registry: duplicate qid " + std::to_string(t.qid));
      }
      reg.templates.push_back(std::move(t));
    }
    std::sort(reg.templates.begin(), reg.templates.end(),
              [](const auto& a, const auto& b) { return a.qid < b.qid; });
    return reg;
  } catch (const json::exception& e) {
    throw Error(Errc::parse_error, std::string("registry: ") + e.what());
  }
}

Registry load_registry(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(Errc::missing_file, path.string());
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::exception& e) {
    throw Error(Errc::parse_error, path.string() + ": " + e.what());
  }
  return registry_from_json(doc);
}

void save_registry(const std::filesystem::path& path, const Registry& registry) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(Errc::io_failure, path.string());
  out << registry_to_json(registry).dump(2) << '\n';
}

std::vector<std::string> answer_vocabulary(const Registry& registry) {
  std::vector<std::string> vocab;
  std::set<std::string> seen;
  for (const auto& t : registry.templates) {
    for (const auto& a : t.answer_domain) {
      if (seen.insert(a).second) vocab.push_back(a);
    }
  }
  return vocab;
}

SizeBin size_bin(double ratio, const AnswerThresholds& t) {
  if (ratio < t.size_bins[0]) return SizeBin::tiny;
  if (ratio < t.size_bins[1]) return SizeBin::small;
  if (ratio < t.size_bins[2]) return SizeBin::medium;
  return SizeBin::large;
}

DistanceBin distance_bin(double d, const AnswerThresholds& t) {
  if (d < t.distance_bins[0]) return DistanceBin::adjacent;
  if (d < t.distance_bins[1]) return DistanceBin::near;
  if (d < t.distance_bins[2]) return DistanceBin::medium;
  return DistanceBin::far;
}

SizeRelation size_relation(double scale, const AnswerThresholds& t) {
  if (scale > t.enlarged_above) return SizeRelation::enlarged;
  if (scale < t.shrunk_below) return SizeRelation::shrunk;
  return SizeRelation::unchanged;
}

std::string tamper_type_label(ItemKind kind, std::optional<BlurKind> blur) {
  switch (kind) {
    case ItemKind::untampered: return "none";
    case ItemKind::copy_move: return "copy-move";
    case ItemKind::blur:
      if (!blur) throw Error(Errc::invalid_record, "blur item without blur kind");
      switch (*blur) {
        case BlurKind::gaussian: return "gaussian-blur";
        case BlurKind::mosaic: return "mosaic-blur";
        case BlurKind::daub: return "daub";
      }
  }
  throw Error(Errc::invalid_record, "unknown item kind");
}

FactSheet untampered_facts(const ItemContext& context) {
  FactSheet f;
  f.item_kind = ItemKind::untampered;
  f.tampered = false;
  f.tamper_type = "none";
  f.theme = context.theme;
  return f;
}

FactSheet derive_facts(const TamperRecord& record, const ItemContext& context,
                       const AnswerThresholds& thresholds) {
  const BinaryMask& src = record.src_mask;
  const BinaryMask& tmp = record.tmp_mask;
  if (src.empty_raster() || tmp.empty_raster() || src.size() != tmp.size()) {
    throw Error(Errc::invalid_record, record.record_id + ": mask dimensions");
  }
  if (!src.any() || !tmp.any()) throw Error(Errc::invalid_record, record.record_id + ": empty mask");
  const ImageSize size = src.size();
  const double image_area = static_cast<double>(size.width) * size.height;

  FactSheet f;
  f.item_kind = record.kind == TamperKind::copy_move ? ItemKind::copy_move : ItemKind::blur;
  f.tampered = true;
  f.tamper_type = tamper_type_label(f.item_kind, record.params.blur_kind);
  f.object_class = record.instance.class_label;
  f.theme = context.theme;
  f.class_unique = context.class_instance_count == 1;

  const RegionStats tmp_stats = region_stats(tmp);
  f.tmp_cell = grid_cell(tmp_stats.centroid, size);
  f.tmp_size = size_bin(tmp_stats.area_px / image_area, thresholds);
  f.tmp_touches_border = tmp_stats.bbox.touches_border(size);

  if (record.kind == TamperKind::blur) {
    if (!(src == tmp)) throw Error(Errc::invalid_record, record.record_id + ": blur masks differ");
    return f;
  }

  const RegionStats src_stats = region_stats(src);
  f.src_cell = grid_cell(src_stats.centroid, size);
  f.src_size = size_bin(src_stats.area_px / image_area, thresholds);
  try {
    f.direction_src_to_tmp = direction(src_stats.centroid, tmp_stats.centroid);
  } catch (const Error&) {
    throw Error(Errc::invalid_record, record.record_id + ": coincident region centroids");
  }
  f.distance = distance_bin(normalized_distance(src_stats.centroid, tmp_stats.centroid, size), thresholds);
  f.size_relation = rscm::size_relation(record.params.scale, thresholds);
  f.rotated = record.params.rotation_deg != 0.0;
  f.overlapping = overlap_fraction(src, tmp) > 0.0;
  return f;
}

std::optional<std::string> answer_for(const FactSheet& f, FactKey key) {
  const auto str = [](const auto& opt) -> std::optional<std::string> {
    if (!opt) return std::nullopt;
    return std::string(to_string(*opt));
  };
  const auto yn = [](const std::optional<bool>& v) -> std::optional<std::string> {
    if (!v) return std::nullopt;
    return yes_no(*v);
  };
  switch (key) {
    case FactKey::tampered: return yes_no(f.tampered);
    case FactKey::object_class: return str(f.object_class);
    case FactKey::scene_theme: return f.theme;
    case FactKey::tamper_type:
      if (!f.tampered) return std::nullopt;
      return f.tamper_type;
    case FactKey::tmp_cell: return str(f.tmp_cell);
    case FactKey::tmp_size: return str(f.tmp_size);
    case FactKey::src_cell: return str(f.src_cell);
    case FactKey::src_size: return str(f.src_size);
    case FactKey::tmp_touches_border: return yn(f.tmp_touches_border);
    case FactKey::class_unique: return yn(f.class_unique);
    case FactKey::direction: return str(f.direction_src_to_tmp);
    case FactKey::distance: return str(f.distance);
    case FactKey::size_relation: return str(f.size_relation);
    case FactKey::overlapping: return yn(f.overlapping);
    case FactKey::rotated: return yn(f.rotated);
  }
  return std::nullopt;
}

std::string render_text(const QuestionTemplate& tmpl, const FactSheet& facts) {
  std::string out;
  const std::string& pattern = tmpl.text_pattern;
  std::size_t pos = 0;
  while (pos < pattern.size()) {
    const std::size_t open = pattern.find('{', pos);
    if (open == std::string::npos) {
      out.append(pattern, pos, std::string::npos);
      break;
    }
    const std::size_t close = pattern.find('}', open);
    if (close == std::string::npos) throw Error(Errc::missing_slot, "unterminated slot in qid " + std::to_string(tmpl.qid));
    out.append(pattern, pos, open - pos);
    const std::string slot = pattern.substr(open + 1, close - open - 1);
    if (slot == "object" && facts.object_class) {
      out.append(to_string(*facts.object_class));
    } else if (slot == "theme" && facts.theme) {
      out.append(*facts.theme);
    } else {
      throw Error(Errc::missing_slot, "slot {" + slot + "} in qid " + std::to_string(tmpl.qid));
    }
    pos = close + 1;
  }
  return out;
}

std::string make_triple_id(std::string_view image_id, int qid) {
  std::string key(image_id);
  key += '#';
  key += std::to_string(qid);
  return sha256_hex(key).substr(0, 16);
}

std::vector<Triple> synthesize(const FactSheet& facts, std::string_view image_id,
                               const Registry& registry) {
  if (facts.item_kind == ItemKind::blur && registry.kind != DatasetKind::tqa) {
    throw Error(Errc::invalid_record, "blur items belong to tqa datasets");
  }
  std::vector<Triple> triples;
  for (const auto& tmpl : registry.templates) {
    if (!tmpl.applies_to(facts.item_kind)) continue;
    const auto answer = answer_for(facts, tmpl.fact);
    if (!answer) {
      throw Error(Errc::template_gap, std::string(image_id) + ": no answer for qid " + std::to_string(tmpl.qid));
    }
    if (!tmpl.accepts(*answer)) {
      throw Error(Errc::template_gap, std::string(image_id) + ": answer '" + *answer +
                                          "' outside domain of qid " + std::to_string(tmpl.qid));
    }
    Triple t;
    t.image_id = std::string(image_id);
    t.qid = tmpl.qid;
    t.triple_id = make_triple_id(image_id, tmpl.qid);
    t.category = tmpl.category;
    t.question_text = render_text(tmpl, facts);
    t.answer = *answer;
    triples.push_back(std::move(t));
  }
  return triples;
}

}  // namespace rscm
