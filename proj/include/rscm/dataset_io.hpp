#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "rscm/curator.hpp"
#include "rscm/qa.hpp"
#include "rscm/tamper.hpp"

namespace rscm {

inline constexpr int kImageSide = 512;
inline constexpr std::string_view kToolVersion = "0.1.0";

// ---------------------------------------------------------------------------
// Input corpus: <root>/index.json lists items with paths relative to <root>.

struct CorpusInstance {
  std::string instance_id;
  ObjectClass class_label = ObjectClass::building;
  std::filesystem::path mask_path;
};

struct CorpusItem {
  std::string image_id;
  std::filesystem::path image_path;
  std::filesystem::path semantic_mask_path;
  std::vector<CorpusInstance> instances;
  std::optional<std::string> theme;
};

/// Parses the index and (unless validate_pixels is false) decodes every raster
/// to check the 512x512 RGB contract and binary instance masks.
/// Throws MissingFile, BadDimensions, NonBinaryMask, BadFormat, ParseError.
std::vector<CorpusItem> load_corpus(const std::filesystem::path& root, bool validate_pixels = true);

/// Writes <root>/index.json for the given items (paths stored relative to root).
void write_corpus_index(const std::filesystem::path& root, const std::vector<CorpusItem>& items);

struct LoadedItem {
  RgbImage image;
  Plane<std::uint8_t> semantic;
  std::vector<SourceInstance> instances;  // sorted by instance_id
};

LoadedItem load_item(const CorpusItem& item);

// ---------------------------------------------------------------------------
// Output dataset.

enum class Role { tampered, original, segmentation, source, tampering };
inline constexpr std::array<Role, 5> kRoles = {Role::tampered, Role::original, Role::segmentation,
                                               Role::source, Role::tampering};
std::string_view to_string(Role role);
/// images/, originals/, masks_seg/, masks_src/, masks_tmp/
std::string_view role_directory(Role role);
/// "<dir>/<image_id>__<record_id>__<role>.png"
std::string item_relative_path(std::string_view image_id, std::string_view record_id, Role role);

struct ItemEntry {
  std::string record_id;
  std::string image_id;
  ItemKind kind = ItemKind::untampered;
  std::optional<std::string> instance_id;
  std::optional<ObjectClass> class_label;
  /// Absent for untampered items and for hand-authored records without stored transforms.
  std::optional<TamperParams> params;
  std::optional<std::string> theme;
  int class_instance_count = 0;
  bool degenerate = false;
  std::map<Role, std::string> files;

  friend bool operator==(const ItemEntry&, const ItemEntry&) = default;
};

struct ItemRasters {
  const RgbImage& tampered;
  const RgbImage& original;
  const Plane<std::uint8_t>& segmentation;
  const BinaryMask& source;
  const BinaryMask& tampering;
};

/// Writes the five rasters of one item and records their checksums in `checksums`
/// (keyed by relative path). Throws IoFailure.
void write_item(const std::filesystem::path& out_root, ItemEntry& entry, const ItemRasters& rasters,
                std::map<std::string, std::string>& checksums);

// ---------------------------------------------------------------------------
// Triples: one JSON object per line, keys in sorted order.

std::string triple_to_line(const Triple& triple);
/// Throws ParseError carrying the 1-based line number.
Triple triple_from_line(std::string_view line, std::size_t line_no);
void write_triples(const std::vector<Triple>& triples, const std::filesystem::path& path);
std::vector<Triple> read_triples(const std::filesystem::path& path);

/// One id per line.
void write_id_list(const std::vector<std::string>& ids, const std::filesystem::path& path);
std::vector<std::string> read_id_list(const std::filesystem::path& path);

// ---------------------------------------------------------------------------
// Manifest.

struct SplitInfo {
  std::uint64_t seed = 0;
  SplitRatios ratios;
  std::array<std::string, 3> files = {"splits/train.txt", "splits/val.txt", "splits/test.txt"};
};

struct BalanceInfo {
  double tolerance = 0.02;
  std::uint64_t seed = 0;
  std::size_t per_qid_target = 0;
  std::string file = "triples_balanced.jsonl";
};

struct Manifest {
  std::string tool_version{kToolVersion};
  std::uint64_t global_seed = 0;
  DatasetKind dataset_kind = DatasetKind::cmqa;
  nlohmann::json config = nlohmann::json::object();
  std::vector<ItemEntry> items;
  std::size_t triple_count = 0;
  std::string triples_file = "triples.jsonl";
  std::string registry_file = "registry.json";
  std::optional<SplitInfo> splits;
  std::optional<BalanceInfo> balance;
  /// Relative path -> sha256 of file content.
  std::map<std::string, std::string> checksums;
};

inline constexpr std::string_view kManifestName = "manifest.json";

nlohmann::json manifest_to_json(const Manifest& manifest);
Manifest manifest_from_json(const nlohmann::json& doc);

/// Canonical serialization, written to a temporary file and renamed into place.
void write_manifest(const Manifest& manifest, const std::filesystem::path& path);

/// With verify, every checksum is checked against files next to the manifest.
/// Throws ParseError, MissingFile, ChecksumMismatch.
Manifest read_manifest(const std::filesystem::path& path, bool verify = true);

/// Throws MissingFile or ChecksumMismatch on the first failing entry; also
/// requires every item raster to be listed.
void verify_checksums(const Manifest& manifest, const std::filesystem::path& root);

}  // namespace rscm
