#include "rscm/dataset_io.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

#include "rscm/hash.hpp"
#include "rscm/png_io.hpp"

namespace rscm {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

json read_json_file(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(Errc::missing_file, path.string());
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw Error(Errc::parse_error, path.string() + ": " + e.what());
  }
}

void write_text_atomic(const fs::path& path, const std::string& text) {
  fs::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(Errc::io_failure, "cannot write " + tmp.string());
    out << text;
    out.flush();
    if (!out) throw Error(Errc::io_failure, "write failed " + tmp.string());
  }
  std::error_code ec;
  fs::rename(tmp, path, ec);
  if (ec) throw Error(Errc::io_failure, "rename failed " + path.string() + ": " + ec.message());
}

void require_size(ImageSize size, const fs::path& path) {
  if (size.width != kImageSide || size.height != kImageSide) {
    throw Error(Errc::bad_dimensions, path.string() + ": " + std::to_string(size.width) + "x" +
                                          std::to_string(size.height) + ", expected 512x512");
  }
}

json params_to_json(const TamperParams& p) {
  json j = {{"scale", p.scale},
            {"rotation_deg", p.rotation_deg},
            {"translation", {p.translation.x(), p.translation.y()}}};
  if (p.blur_kind) {
    j["blur_kind"] = to_string(*p.blur_kind);
    j["blur_strength"] = p.blur_strength;
  }
  return j;
}

TamperParams params_from_json(const json& j) {
  TamperParams p;
  p.scale = j.at("scale").get<double>();
  p.rotation_deg = j.at("rotation_deg").get<double>();
  const auto t = j.at("translation").get<std::array<int, 2>>();
  p.translation = Eigen::Vector2i(t[0], t[1]);
  if (j.contains("blur_kind")) {
    const auto kind = parse_blur_kind(j.at("blur_kind").get<std::string>());
    if (!kind) throw Error(Errc::parse_error, "unknown blur kind in manifest");
    p.blur_kind = *kind;
    p.blur_strength = j.at("blur_strength").get<double>();
  }
  return p;
}

}  // namespace

// ---------------------------------------------------------------------------

std::vector<CorpusItem> load_corpus(const fs::path& root, bool validate_pixels) {
  const fs::path index = root / "index.json";
  const json doc = read_json_file(index);
  std::vector<CorpusItem> items;
  std::set<std::string> ids;
  try {
    for (const auto& j : doc.at("items")) {
      CorpusItem item;
      item.image_id = j.at("image_id").get<std::string>();
      item.image_path = root / j.at("image").get<std::string>();
      item.semantic_mask_path = root / j.at("semantic_mask").get<std::string>();
      if (j.contains("theme") && !j.at("theme").is_null()) item.theme = j.at("theme").get<std::string>();
      if (!ids.insert(item.image_id).second) {
        throw Error(Errc::parse_error, "duplicate image_id " + item.image_id);
      }
      std::set<std::string> instance_ids;
      for (const auto& ji : j.at("instances")) {
        CorpusInstance inst;
        inst.instance_id = ji.at("instance_id").get<std::string>();
        const auto cls = parse_object_class(ji.at("class").get<std::string>());
        if (!cls) throw Error(Errc::parse_error, "unknown class for " + inst.instance_id);
        inst.class_label = *cls;
        inst.mask_path = root / ji.at("mask").get<std::string>();
        if (!instance_ids.insert(inst.instance_id).second) {
          throw Error(Errc::parse_error, "duplicate instance_id " + inst.instance_id);
        }
        item.instances.push_back(std::move(inst));
      }
      std::sort(item.instances.begin(), item.instances.end(),
                [](const auto& a, const auto& b) { return a.instance_id < b.instance_id; });
      items.push_back(std::move(item));
    }
  } catch (const json::exception& e) {
    throw Error(Errc::parse_error, index.string() + ": " + e.what());
  }
  std::sort(items.begin(), items.end(), [](const auto& a, const auto& b) { return a.image_id < b.image_id; });

  if (validate_pixels) {
    for (const auto& item : items) {
      require_size(read_rgb_png(item.image_path).size(), item.image_path);
      const auto seg = read_gray_png(item.semantic_mask_path);
      require_size({static_cast<int>(seg.cols()), static_cast<int>(seg.rows())}, item.semantic_mask_path);
      for (const auto& inst : item.instances) {
        require_size(read_mask_png(inst.mask_path).size(), inst.mask_path);
      }
    }
  }
  return items;
}

void write_corpus_index(const fs::path& root, const std::vector<CorpusItem>& items) {
  // Relative paths are taken as already relative to root.
  const auto rel = [&root](const fs::path& p) {
    return (p.is_relative() ? p : fs::relative(p, root)).generic_string();
  };
  json list = json::array();
  for (const auto& item : items) {
    json instances = json::array();
    for (const auto& inst : item.instances) {
      instances.push_back({{"instance_id", inst.instance_id},
                           {"class", to_string(inst.class_label)},
                           {"mask", rel(inst.mask_path)}});
    }
    json j = {{"image_id", item.image_id},
              {"image", rel(item.image_path)},
              {"semantic_mask", rel(item.semantic_mask_path)},
              {"instances", std::move(instances)}};
    if (item.theme) j["theme"] = *item.theme;
    list.push_back(std::move(j));
  }
  write_text_atomic(root / "index.json", json{{"items", std::move(list)}}.dump(2) + "\n");
}

LoadedItem load_item(const CorpusItem& item) {
  LoadedItem loaded;
  loaded.image = read_rgb_png(item.image_path);
  require_size(loaded.image.size(), item.image_path);
  loaded.semantic = read_gray_png(item.semantic_mask_path);
  for (const auto& inst : item.instances) {
    SourceInstance src;
    src.instance_id = inst.instance_id;
    src.class_label = inst.class_label;
    src.mask = read_mask_png(inst.mask_path);
    src.image_id = item.image_id;
    if (src.mask.size() != loaded.image.size()) {
      throw Error(Errc::bad_dimensions, inst.mask_path.string() + ": mask does not match image");
    }
    loaded.instances.push_back(std::move(src));
  }
  return loaded;
}

// ---------------------------------------------------------------------------

std::string_view to_string(Role role) {
  switch (role) {
    case Role::tampered: return "tampered";
    case Role::original: return "original";
    case Role::segmentation: return "segmentation";
    case Role::source: return "source";
    case Role::tampering: return "tampering";
  }
  return "unknown";
}

std::string_view role_directory(Role role) {
  switch (role) {
    case Role::tampered: return "images";
    case Role::original: return "originals";
    case Role::segmentation: return "masks_seg";
    case Role::source: return "masks_src";
    case Role::tampering: return "masks_tmp";
  }
  return "unknown";
}

std::string item_relative_path(std::string_view image_id, std::string_view record_id, Role role) {
  std::string out(role_directory(role));
  out += '/';
  out += image_id;
  out += "__";
  out += record_id;
  out += "__";
  out += to_string(role);
  out += ".png";
  return out;
}

void write_item(const fs::path& out_root, ItemEntry& entry, const ItemRasters& rasters,
                std::map<std::string, std::string>& checksums) {
  for (Role role : kRoles) {
    const std::string rel = item_relative_path(entry.image_id, entry.record_id, role);
    const fs::path path = out_root / rel;
    std::error_code ec;
    fs::create_directories(path.parent_path(), ec);
    if (ec) throw Error(Errc::io_failure, "mkdir " + path.parent_path().string());
    switch (role) {
      case Role::tampered: write_rgb_png(path, rasters.tampered); break;
      case Role::original: write_rgb_png(path, rasters.original); break;
      case Role::segmentation: write_gray_png(path, rasters.segmentation); break;
      case Role::source: write_mask_png(path, rasters.source); break;
      case Role::tampering: write_mask_png(path, rasters.tampering); break;
    }
    entry.files[role] = rel;
    checksums[rel] = sha256_file(path);
  }
}

// ---------------------------------------------------------------------------

std::string triple_to_line(const Triple& t) {
  const json j = {{"triple_id", t.triple_id}, {"image_id", t.image_id},
                  {"qid", t.qid},             {"category", to_string(t.category)},
                  {"question_text", t.question_text}, {"answer", t.answer}};
  return j.dump();
}

Triple triple_from_line(std::string_view line, std::size_t line_no) {
  try {
    const json j = json::parse(line);
    if (!j.is_object() || j.size() != 6) throw Error(Errc::parse_error, "expected 6 fields", line_no);
    Triple t;
    t.triple_id = j.at("triple_id").get<std::string>();
    t.image_id = j.at("image_id").get<std::string>();
    t.qid = j.at("qid").get<int>();
    const auto category = parse_category(j.at("category").get<std::string>());
    if (!category) throw Error(Errc::parse_error, "unknown category", line_no);
    t.category = *category;
    t.question_text = j.at("question_text").get<std::string>();
    t.answer = j.at("answer").get<std::string>();
    return t;
  } catch (const json::exception& e) {
    throw Error(Errc::parse_error, e.what(), line_no);
  }
}

void write_triples(const std::vector<Triple>& triples, const fs::path& path) {
  std::string text;
  for (const auto& t : triples) {
    text += triple_to_line(t);
    text += '\n';
  }
  write_text_atomic(path, text);
}

std::vector<Triple> read_triples(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(Errc::missing_file, path.string());
  std::vector<Triple> out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    out.push_back(triple_from_line(line, line_no));
  }
  return out;
}

void write_id_list(const std::vector<std::string>& ids, const fs::path& path) {
  std::error_code ec;
  fs::create_directories(path.parent_path(), ec);
  std::string text;
  for (const auto& id : ids) {
    text += id;
    text += '\n';
  }
  write_text_atomic(path, text);
}

std::vector<std::string> read_id_list(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(Errc::missing_file, path.string());
  std::vector<std::string> ids;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty()) ids.push_back(line);
  }
  return ids;
}

// ---------------------------------------------------------------------------

json manifest_to_json(const Manifest& m) {
  json items = json::array();
  for (const auto& e : m.items) {
    json files = json::object();
    for (const auto& [role, rel] : e.files) files[std::string(to_string(role))] = rel;
    json j = {{"record_id", e.record_id},
              {"image_id", e.image_id},
              {"kind", to_string(e.kind)},
              {"class_instance_count", e.class_instance_count},
              {"degenerate", e.degenerate},
              {"files", std::move(files)}};
    if (e.instance_id) j["instance_id"] = *e.instance_id;
    if (e.class_label) j["class"] = to_string(*e.class_label);
    if (e.params) j["params"] = params_to_json(*e.params);
    if (e.theme) j["theme"] = *e.theme;
    items.push_back(std::move(j));
  }
  json doc = {{"tool_version", m.tool_version},
              {"global_seed", m.global_seed},
              {"dataset_kind", to_string(m.dataset_kind)},
              {"config", m.config},
              {"items", std::move(items)},
              {"triple_count", m.triple_count},
              {"triples_file", m.triples_file},
              {"registry_file", m.registry_file},
              {"checksums", m.checksums}};
  if (m.splits) {
    doc["splits"] = {{"seed", m.splits->seed},
                     {"ratios", {m.splits->ratios.train, m.splits->ratios.val, m.splits->ratios.test}},
                     {"files", m.splits->files}};
  }
  if (m.balance) {
    doc["balance"] = {{"tolerance", m.balance->tolerance},
                      {"seed", m.balance->seed},
                      {"per_qid_target", m.balance->per_qid_target},
                      {"file", m.balance->file}};
  }
  return doc;
}

Manifest manifest_from_json(const json& doc) {
  try {
    Manifest m;
    m.tool_version = doc.at("tool_version").get<std::string>();
    m.global_seed = doc.at("global_seed").get<std::uint64_t>();
    const auto kind = parse_dataset_kind(doc.at("dataset_kind").get<std::string>());
    if (!kind) throw Error(Errc::parse_error, "manifest: unknown dataset_kind");
    m.dataset_kind = *kind;
    m.config = doc.at("config");
    m.triple_count = doc.at("triple_count").get<std::size_t>();
    m.triples_file = doc.at("triples_file").get<std::string>();
    m.registry_file = doc.at("registry_file").get<std::string>();
    m.checksums = doc.at("checksums").get<std::map<std::string, std::string>>();
    for (const auto& j : doc.at("items")) {
      ItemEntry e;
      e.record_id = j.at("record_id").get<std::string>();
      e.image_id = j.at("image_id").get<std::string>();
      const auto ik = parse_item_kind(j.at("kind").get<std::string>());
      if (!ik) throw Error(Errc::parse_error, "manifest: unknown item kind for " + e.record_id);
      e.kind = *ik;
      e.class_instance_count = j.at("class_instance_count").get<int>();
      e.degenerate = j.at("degenerate").get<bool>();
      if (j.contains("instance_id")) e.instance_id = j.at("instance_id").get<std::string>();
      if (j.contains("class")) {
        const auto cls = parse_object_class(j.at("class").get<std::string>());
        if (!cls) throw Error(Errc::parse_error, "manifest: unknown class for " + e.record_id);
        e.class_label = *cls;
      }
      if (j.contains("params")) e.params = params_from_json(j.at("params"));
      if (j.contains("theme")) e.theme = j.at("theme").get<std::string>();
      for (Role role : kRoles) {
        const auto& files = j.at("files");
        const std::string key(to_string(role));
        if (files.contains(key)) e.files[role] = files.at(key).get<std::string>();
      }
      m.items.push_back(std::move(e));
    }
    if (doc.contains("splits")) {
      SplitInfo s;
      const auto& j = doc.at("splits");
      s.seed = j.at("seed").get<std::uint64_t>();
      const auto r = j.at("ratios").get<std::array<double, 3>>();
      s.ratios = {r[0], r[1], r[2]};
      s.files = j.at("files").get<std::array<std::string, 3>>();
      m.splits = s;
    }
    if (doc.contains("balance")) {
      BalanceInfo b;
      const auto& j = doc.at("balance");
      b.tolerance = j.at("tolerance").get<double>();
      b.seed = j.at("seed").get<std::uint64_t>();
      b.per_qid_target = j.at("per_qid_target").get<std::size_t>();
      b.file = j.at("file").get<std::string>();
      m.balance = b;
    }
    return m;
  } catch (const json::exception& e) {
    throw Error(Errc::parse_error, std::string("manifest: ") + e.what());
  }
}

void write_manifest(const Manifest& manifest, const fs::path& path) {
  write_text_atomic(path, manifest_to_json(manifest).dump(2) + "\n");
}

Manifest read_manifest(const fs::path& path, bool verify) {
  Manifest m = manifest_from_json(read_json_file(path));
  if (verify) verify_checksums(m, path.parent_path());
  return m;
}

void verify_checksums(const Manifest& manifest, const fs::path& root) {
  for (const auto& e : manifest.items) {
    for (Role role : kRoles) {
      const auto it = e.files.find(role);
      if (it == e.files.end()) {
        throw Error(Errc::missing_file, e.record_id + ": no " + std::string(to_string(role)) + " raster listed");
      }
      if (!manifest.checksums.contains(it->second)) {
        throw Error(Errc::checksum_mismatch, it->second + ": no checksum recorded");
      }
    }
  }
  for (const auto& [rel, expected] : manifest.checksums) {
    const fs::path path = root / rel;
    if (!fs::exists(path)) throw Error(Errc::missing_file, path.string());
    if (sha256_file(path) != expected) throw Error(Errc::checksum_mismatch, rel);
  }
}

}  // namespace rscm
