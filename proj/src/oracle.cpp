// Independent verifier. Deliberately avoids rasterops and the qa derivation
// helpers: every geometric quantity is recomputed here with plain loops.

#include "rscm/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <map>
#include <set>

#include "rscm/hash.hpp"
#include "rscm/png_io.hpp"

namespace rscm::oracle {

namespace fs = std::filesystem;
using nlohmann::json;

bool VerificationReport::has_violation(std::string_view rule_id) const {
  return std::any_of(violations.begin(), violations.end(),
                     [rule_id](const Finding& f) { return f.rule_id == rule_id; });
}

void VerificationReport::merge(VerificationReport other) {
  items_checked += other.items_checked;
  for (auto& f : other.violations) violations.push_back(std::move(f));
  for (auto& f : other.warnings) warnings.push_back(std::move(f));
}

json to_json(const VerificationReport& report) {
  const auto list = [](const std::vector<Finding>& findings) {
    json out = json::array();
    for (const auto& f : findings) out.push_back({{"item_id", f.item_id}, {"rule_id", f.rule_id}, {"detail", f.detail}});
    return out;
  };
  return {{"items_checked", report.items_checked},
          {"pass", report.pass()},
          {"violations", list(report.violations)},
          {"warnings", list(report.warnings)}};
}

namespace {

struct Scan {
  long long area = 0;
  double sum_x = 0.0;
  double sum_y = 0.0;
  int min_x = 0, min_y = 0, max_x = -1, max_y = -1;

  double cx() const { return sum_x / static_cast<double>(area); }
  double cy() const { return sum_y / static_cast<double>(area); }
};

Scan scan(const Plane<std::uint8_t>& mask) {
  Scan s;
  s.min_x = static_cast<int>(mask.cols());
  s.min_y = static_cast<int>(mask.rows());
  for (int y = 0; y < mask.rows(); ++y) {
    for (int x = 0; x < mask.cols(); ++x) {
      if (mask(y, x) == 0) continue;
      ++s.area;
      s.sum_x += x;
      s.sum_y += y;
      if (x < s.min_x) s.min_x = x;
      if (y < s.min_y) s.min_y = y;
      if (x > s.max_x) s.max_x = x;
      if (y > s.max_y) s.max_y = y;
    }
  }
  return s;
}

bool touches_frame(const Scan& s, int w, int h) {
  return s.min_x == 0 || s.min_y == 0 || s.max_x == w - 1 || s.max_y == h - 1;
}

int flood_components(const Plane<std::uint8_t>& mask) {
  const int h = static_cast<int>(mask.rows());
  const int w = static_cast<int>(mask.cols());
  std::vector<char> visited(static_cast<std::size_t>(w) * h, 0);
  int n = 0;
  std::deque<std::pair<int, int>> queue;
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      if (mask(y, x) == 0 || visited[y * w + x]) continue;
      ++n;
      visited[y * w + x] = 1;
      queue.emplace_back(x, y);
      while (!queue.empty()) {
        auto [px, py] = queue.front();
        queue.pop_front();
        const int dx[4] = {1, -1, 0, 0};
        const int dy[4] = {0, 0, 1, -1};
        for (int k = 0; k < 4; ++k) {
          const int nx = px + dx[k];
          const int ny = py + dy[k];
          if (nx < 0 || ny < 0 || nx >= w || ny >= h) continue;
          if (mask(ny, nx) == 0 || visited[ny * w + nx]) continue;
          visited[ny * w + nx] = 1;
          queue.emplace_back(nx, ny);
        }
      }
    }
  }
  return n;
}

const char* const kCells[3][3] = {{"top-left", "top", "top-right"},
                                  {"left", "center", "right"},
                                  {"bottom-left", "bottom", "bottom-right"}};

std::string cell_of(double x, double y, int w, int h) {
  int col = static_cast<int>(std::floor(3.0 * x / w));
  int row = static_cast<int>(std::floor(3.0 * y / h));
  col = col < 0 ? 0 : (col > 2 ? 2 : col);
  row = row < 0 ? 0 : (row > 2 ? 2 : row);
  return kCells[row][col];
}

std::string compass(double fx, double fy, double tx, double ty) {
  double deg = std::atan2(fy - ty, tx - fx) * 180.0 / M_PI;
  if (deg < 0.0) deg += 360.0;
  if (deg <= 22.5 || deg > 337.5) return "east";
  if (deg <= 67.5) return "northeast";
  if (deg <= 112.5) return "north";
  if (deg <= 157.5) return "northwest";
  if (deg <= 202.5) return "west";
  if (deg <= 247.5) return "southwest";
  if (deg <= 292.5) return "south";
  return "southeast";
}

template <std::size_t N>
std::string bin_of(double v, const std::array<double, 3>& edges, const std::array<const char*, N>& names) {
  for (std::size_t i = 0; i < 3; ++i) {
    if (v < edges[i]) return names[i];
  }
  return names[3];
}

struct ItemFiles {
  std::optional<RgbImage> tampered;
  std::optional<RgbImage> original;
  std::optional<Plane<std::uint8_t>> source;
  std::optional<Plane<std::uint8_t>> tampering;
};

ItemFiles load_files(const ItemEntry& entry, const fs::path& root, VerificationReport& report,
                     bool want_rgb) {
  ItemFiles files;
  const auto path_of = [&](Role role) -> std::optional<fs::path> {
    const auto it = entry.files.find(role);
    if (it == entry.files.end()) {
      report.violations.push_back({entry.record_id, std::string(kMissingFile),
                                   std::string(to_string(role)) + " not listed"});
      return std::nullopt;
    }
    const fs::path p = root / it->second;
    if (!fs::exists(p)) {
      report.violations.push_back({entry.record_id, std::string(kMissingFile), it->second});
      return std::nullopt;
    }
    return p;
  };
  const auto guarded = [&](auto&& fn, const fs::path& p) {
    try {
      fn();
    } catch (const Error& e) {
      report.violations.push_back({entry.record_id, std::string(kUnreadableFile), p.string() + ": " + e.what()});
    }
  };
  if (want_rgb) {
    if (auto p = path_of(Role::tampered)) guarded([&] { files.tampered = read_rgb_png(*p); }, *p);
    if (auto p = path_of(Role::original)) guarded([&] { files.original = read_rgb_png(*p); }, *p);
    if (auto p = path_of(Role::segmentation)) guarded([&] { (void)read_gray_png(*p); }, *p);
  }
  const auto load_mask = [&](Role role, std::optional<Plane<std::uint8_t>>& out) {
    auto p = path_of(role);
    if (!p) return;
    guarded([&] {
      Plane<std::uint8_t> raw = read_gray_png(*p);
      const long long bad = ((raw != 0) && (raw != 255)).cast<long long>().sum();
      if (bad > 0) {
        report.violations.push_back({entry.record_id, std::string(kMaskNotBinary),
                                     std::string(to_string(role)) + ": " + std::to_string(bad) + " px"});
      }
      out = (raw != 0).cast<std::uint8_t>();
    }, *p);
  };
  load_mask(Role::source, files.source);
  load_mask(Role::tampering, files.tampering);
  return files;
}

}  // namespace

VerificationReport verify_item(const ItemEntry& entry, const fs::path& root, const Rules& rules) {
  VerificationReport report;
  report.items_checked = 1;
  const auto violate = [&](std::string_view rule, std::string detail) {
    report.violations.push_back({entry.record_id, std::string(rule), std::move(detail)});
  };
  ItemFiles f = load_files(entry, root, report, true);
  if (!f.tampered || !f.original || !f.source || !f.tampering) return report;

  const int w = f.original->width();
  const int h = f.original->height();
  if (f.tampered->width() != w || f.tampered->height() != h || f.source->cols() != w ||
      f.source->rows() != h || f.tampering->cols() != w || f.tampering->rows() != h) {
    violate(kDimensionMismatch, "item rasters differ in size");
    return report;
  }
  const Plane<std::uint8_t>& src = *f.source;
  const Plane<std::uint8_t>& tmp = *f.tampering;
  const RgbImage& tampered = *f.tampered;
  const RgbImage& original = *f.original;

  long long diff_outside = 0;
  long long diff_inside = 0;
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      bool differs = false;
      for (int c = 0; c < 3; ++c) differs |= tampered.channels[c](y, x) != original.channels[c](y, x);
      if (!differs) continue;
      if (tmp(y, x) != 0) {
        ++diff_inside;
      } else {
        ++diff_outside;
      }
    }
  }

  if (entry.kind == ItemKind::untampered) {
    const Scan s = scan(src);
    const Scan t = scan(tmp);
    if (diff_outside + diff_inside > 0 || s.area > 0 || t.area > 0) {
      violate(kUntamperedModified, "untampered item has pixel changes or non-empty masks");
    }
    return report;
  }

  const Scan s = scan(src);
  const Scan t = scan(tmp);
  if (s.area == 0 || t.area == 0) {
    violate(kEmptyMask, "source or tampering mask is empty");
    return report;
  }
  if (diff_outside > 0) violate(kDiffOutsideMask, std::to_string(diff_outside) + " px changed outside");
  if (diff_inside == 0) {
    report.warnings.push_back({entry.record_id, std::string(kDegeneratePaste), "no pixel inside the region changed"});
  }
  const double area_ratio = static_cast<double>(s.area) / (static_cast<double>(w) * h);
  if (area_ratio < rules.min_area_ratio || area_ratio > rules.max_area_ratio) {
    violate(kAreaOutOfBounds, "source area ratio " + std::to_string(area_ratio));
  }
  const bool road = entry.class_label && *entry.class_label == ObjectClass::road;
  if (!road && (touches_frame(s, w, h) || touches_frame(t, w, h))) {
    violate(kBorderContact, "non-road region touches the image border");
  }
  if (flood_components(src) != 1) violate(kSourceFragmented, "source mask is not one 4-connected region");

  if (entry.kind == ItemKind::blur) {
    long long differing = 0;
    for (int y = 0; y < h; ++y) {
      for (int x = 0; x < w; ++x) differing += (src(y, x) != 0) != (tmp(y, x) != 0);
    }
    if (differing > 0) violate(kBlurMaskMismatch, std::to_string(differing) + " px differ");
    return report;
  }

  long long both = 0;
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) both += (src(y, x) != 0 && tmp(y, x) != 0) ? 1 : 0;
  }
  const double overlap = static_cast<double>(both) / static_cast<double>(s.area);
  if (overlap > rules.max_overlap) violate(kOverlapExceeded, "overlap " + std::to_string(overlap));
  return report;
}

RecomputeResult recompute_answers(const ItemEntry& entry, const std::vector<Triple>& item_triples,
                                  const Registry& registry, const fs::path& root) {
  RecomputeResult result;
  VerificationReport scratch;
  ItemFiles f = load_files(entry, root, scratch, false);
  const bool have_masks = f.source.has_value() && f.tampering.has_value();

  std::map<int, const Triple*> by_qid;
  for (const auto& t : item_triples) by_qid[t.qid] = &t;

  const AnswerThresholds& th = registry.thresholds;
  static constexpr std::array<const char*, 4> kSize = {"tiny", "small", "medium", "large"};
  static constexpr std::array<const char*, 4> kDist = {"adjacent", "near", "medium", "far"};

  std::optional<Scan> s, t;
  int w = 0, h = 0;
  if (have_masks) {
    s = scan(*f.source);
    t = scan(*f.tampering);
    w = static_cast<int>(f.source->cols());
    h = static_cast<int>(f.source->rows());
  }
  const double image_area = static_cast<double>(w) * h;

  const auto expected_for = [&](FactKey key, int qid) -> std::optional<std::string> {
    const bool tampered = entry.kind != ItemKind::untampered;
    const bool masks_ok = have_masks && s->area > 0 && t->area > 0;
    switch (key) {
      case FactKey::tampered: return std::string(tampered ? "yes" : "no");
      case FactKey::object_class:
        if (!entry.class_label) return std::nullopt;
        return std::string(to_string(*entry.class_label));
      case FactKey::scene_theme: return entry.theme;
      case FactKey::tamper_type:
        if (entry.kind == ItemKind::copy_move) return std::string("copy-move");
        if (entry.kind == ItemKind::blur && entry.params && entry.params->blur_kind) {
          switch (*entry.params->blur_kind) {
            case BlurKind::gaussian: return std::string("gaussian-blur");
            case BlurKind::mosaic: return std::string("mosaic-blur");
            case BlurKind::daub: return std::string("daub");
          }
        }
        result.unverifiable.push_back(qid);
        return std::nullopt;
      case FactKey::class_unique: return std::string(entry.class_instance_count == 1 ? "yes" : "no");
      default: break;
    }
    if (!masks_ok) return std::nullopt;
    switch (key) {
      case FactKey::tmp_cell: return cell_of(t->cx(), t->cy(), w, h);
      case FactKey::src_cell: return cell_of(s->cx(), s->cy(), w, h);
      case FactKey::tmp_size: return bin_of(t->area / image_area, th.size_bins, kSize);
      case FactKey::src_size: return bin_of(s->area / image_area, th.size_bins, kSize);
      case FactKey::tmp_touches_border: return std::string(touches_frame(*t, w, h) ? "yes" : "no");
      case FactKey::direction:
        if (s->cx() == t->cx() && s->cy() == t->cy()) return std::nullopt;
        return compass(s->cx(), s->cy(), t->cx(), t->cy());
      case FactKey::distance: {
        const double d = std::hypot(t->cx() - s->cx(), t->cy() - s->cy()) / std::hypot(double(w), double(h));
        return bin_of(d, th.distance_bins, kDist);
      }
      case FactKey::overlapping: {
        long long both = 0;
        for (int y = 0; y < h; ++y) {
          for (int x = 0; x < w; ++x) both += ((*f.source)(y, x) != 0 && (*f.tampering)(y, x) != 0) ? 1 : 0;
        }
        return std::string(both > 0 ? "yes" : "no");
      }
      case FactKey::size_relation:
        if (!entry.params) {
          result.unverifiable.push_back(qid);
          return std::nullopt;
        }
        if (entry.params->scale > th.enlarged_above) return std::string("enlarged");
        if (entry.params->scale < th.shrunk_below) return std::string("shrunk");
        return std::string("unchanged");
      case FactKey::rotated:
        if (!entry.params) {
          result.unverifiable.push_back(qid);
          return std::nullopt;
        }
        return std::string(entry.params->rotation_deg != 0.0 ? "yes" : "no");
      default: return std::nullopt;
    }
  };

  std::set<int> applicable;
  for (const auto& tmpl : registry.templates) {
    if (!tmpl.applies_to(entry.kind)) continue;
    applicable.insert(tmpl.qid);
    const auto it = by_qid.find(tmpl.qid);
    if (it == by_qid.end()) {
      result.mismatches.push_back({entry.record_id, "", tmpl.qid, std::string(kMissingTriple), "", ""});
      continue;
    }
    const auto expected = expected_for(tmpl.fact, tmpl.qid);
    const bool unverifiable = std::find(result.unverifiable.begin(), result.unverifiable.end(), tmpl.qid) !=
                              result.unverifiable.end();
    if (unverifiable) continue;
    if (!expected || *expected != it->second->answer) {
      result.mismatches.push_back({entry.record_id, it->second->triple_id, tmpl.qid,
                                   std::string(kAnswerMismatch), expected.value_or("<underivable>"),
                                   it->second->answer});
    }
  }
  for (const auto& [qid, triple] : by_qid) {
    if (!applicable.contains(qid)) {
      result.mismatches.push_back({entry.record_id, triple->triple_id, qid, std::string(kUnexpectedTriple), "", triple->answer});
    }
  }
  return result;
}

VerificationReport verify_dataset(const fs::path& root, const DatasetOptions& options) {
  VerificationReport report;
  const auto violate = [&](std::string item, std::string_view rule, std::string detail) {
    report.violations.push_back({std::move(item), std::string(rule), std::move(detail)});
  };
  const Manifest manifest = read_manifest(root / kManifestName, false);

  // File integrity.
  for (const auto& [rel, expected] : manifest.checksums) {
    const fs::path p = root / rel;
    if (!fs::exists(p)) {
      violate(rel, kMissingFile, "listed in manifest");
    } else if (sha256_file(p) != expected) {
      violate(rel, kChecksumMismatch, "content hash differs from manifest");
    }
  }
  for (const auto& e : manifest.items) {
    for (const auto& [role, rel] : e.files) {
      if (!manifest.checksums.contains(rel)) violate(e.record_id, kChecksumMismatch, rel + " has no checksum");
    }
  }

  const Registry registry = load_registry(root / manifest.registry_file);
  Rules rules;
  if (manifest.config.contains("max_overlap")) rules.max_overlap = manifest.config.at("max_overlap").get<double>();
  if (manifest.config.contains("min_area_ratio")) rules.min_area_ratio = manifest.config.at("min_area_ratio").get<double>();
  if (manifest.config.contains("max_area_ratio")) rules.max_area_ratio = manifest.config.at("max_area_ratio").get<double>();

  // Triple file integrity.
  std::vector<Triple> triples;
  try {
    triples = read_triples(root / manifest.triples_file);
  } catch (const Error& e) {
    violate(manifest.triples_file, kMissingFile, e.what());
  }
  if (triples.size() != manifest.triple_count) {
    violate(manifest.triples_file, kTripleCount,
            std::to_string(triples.size()) + " lines, manifest says " + std::to_string(manifest.triple_count));
  }
  std::map<std::string, const ItemEntry*> items;
  for (const auto& e : manifest.items) {
    if (!items.emplace(e.record_id, &e).second) violate(e.record_id, kDuplicateId, "record_id repeated");
  }
  std::set<std::string> triple_ids;
  std::map<std::string, std::vector<Triple>> by_item;
  for (const auto& t : triples) {
    if (!triple_ids.insert(t.triple_id).second) violate(t.image_id, kDuplicateId, "triple_id " + t.triple_id);
    const QuestionTemplate* tmpl = registry.find(t.qid);
    if (tmpl == nullptr || !tmpl->accepts(t.answer)) {
      violate(t.image_id, kAnswerOutOfDomain, "qid " + std::to_string(t.qid) + " answer '" + t.answer + "'");
    }
    if (!items.contains(t.image_id)) {
      violate(t.image_id, kOrphanTriple, "triple " + t.triple_id + " references no item");
      continue;
    }
    by_item[t.image_id].push_back(t);
  }

  // Per-item pixel and answer checks.
  for (const auto& e : manifest.items) {
    report.merge(verify_item(e, root, rules));
    const RecomputeResult r = recompute_answers(e, by_item[e.record_id], registry, root);
    for (const auto& m : r.mismatches) {
      violate(e.record_id, m.rule_id,
              "qid " + std::to_string(m.qid) + " expected '" + m.expected + "' stored '" + m.stored + "'");
    }
    for (int qid : r.unverifiable) {
      report.warnings.push_back({e.record_id, std::string(kUnverifiable), "qid " + std::to_string(qid)});
    }
  }

  // Split partition grouped by raw image.
  if (manifest.splits) {
    std::map<std::string, int> seen;
    std::map<std::string, std::set<int>> group_splits;
    for (int s = 0; s < 3; ++s) {
      std::vector<std::string> ids;
      try {
        ids = read_id_list(root / manifest.splits->files[s]);
      } catch (const Error& e) {
        violate(manifest.splits->files[s], kMissingFile, e.what());
      }
      for (const auto& id : ids) {
        const auto it = items.find(id);
        if (it == items.end()) {
          violate(id, kSplitPartition, "split entry is not an item");
          continue;
        }
        if (++seen[id] > 1) violate(id, kSplitPartition, "item listed in more than one split slot");
        group_splits[it->second->image_id].insert(s);
      }
    }
    for (const auto& e : manifest.items) {
      if (!seen.contains(e.record_id)) violate(e.record_id, kSplitPartition, "item missing from splits");
    }
    for (const auto& [group, splits] : group_splits) {
      if (splits.size() > 1) violate(group, kSplitLeak, "raw image spans " + std::to_string(splits.size()) + " splits");
    }
  }

  // Balanced subset.
  if (manifest.balance) {
    std::vector<Triple> balanced;
    try {
      balanced = read_triples(root / manifest.balance->file);
    } catch (const Error& e) {
      violate(manifest.balance->file, kMissingFile, e.what());
    }
    std::map<std::string, const Triple*> full;
    for (const auto& t : triples) full[t.triple_id] = &t;
    std::map<int, std::size_t> counts;
    for (const auto& t : triples) counts[t.qid] = 0;
    for (const auto& t : balanced) {
      const auto it = full.find(t.triple_id);
      if (it == full.end() || !(*it->second == t)) violate(t.triple_id, kBalanceNotSubset, "not in the full triple set");
      ++counts[t.qid];
    }
    if (!counts.empty()) {
      std::size_t lo = std::numeric_limits<std::size_t>::max(), hi = 0;
      for (const auto& [qid, n] : counts) {
        lo = std::min(lo, n);
        hi = std::max(hi, n);
      }
      const double deviation = lo == 0 ? std::numeric_limits<double>::infinity()
                                       : static_cast<double>(hi) / static_cast<double>(lo) - 1.0;
      if (deviation > manifest.balance->tolerance) {
        violate(manifest.balance->file, kBalanceTolerance, "qid deviation " + std::to_string(deviation));
      }
    }
  }

  if (options.strict) {
    for (const auto& w : report.warnings) report.violations.push_back(w);
  }
  return report;
}

}  // namespace rscm::oracle
