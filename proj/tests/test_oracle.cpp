#include <cmath>

#include "dataset_fixture.hpp"
#include "doctest.h"
#include "fault_catalog.hpp"
#include "rscm/dataset_io.hpp"
#include "rscm/oracle.hpp"
#include "rscm/png_io.hpp"

using namespace rscm;
namespace fs = std::filesystem;

namespace {

std::map<std::string, std::vector<Triple>> triples_by_item(const fs::path& root) {
  std::map<std::string, std::vector<Triple>> out;
  for (const auto& t : read_triples(root / "triples.jsonl")) out[t.image_id].push_back(t);
  return out;
}

// Third, test-local derivation of the direction answer.
std::string naive_direction(const BinaryMask& src, const BinaryMask& tmp) {
  const auto centroid = [](const BinaryMask& m) {
    double sx = 0, sy = 0, n = 0;
    for (int y = 0; y < m.height(); ++y)
      for (int x = 0; x < m.width(); ++x)
        if (m(x, y)) {
          sx += x;
          sy += y;
          ++n;
        }
    return std::pair{sx / n, sy / n};
  };
  const auto [ax, ay] = centroid(src);
  const auto [bx, by] = centroid(tmp);
  double deg = std::atan2(ay - by, bx - ax) * 180.0 / M_PI;
  if (deg <= -22.5) deg += 360.0;
  static const char* names[] = {"east", "northeast", "north", "northwest", "west", "southwest", "south", "southeast"};
  for (int k = 0; k < 8; ++k) {
    if (deg > 45.0 * k - 22.5 && deg <= 45.0 * k + 22.5) return names[k];
  }
  return "east";
}

}  // namespace

TEST_SUITE("oracle") {

TEST_CASE("a freshly generated dataset verifies clean") {
  const auto& root = testutil::small_dataset();
  const auto report = oracle::verify_dataset(root);
  for (const auto& v : report.violations) MESSAGE(v.item_id << " " << v.rule_id << " " << v.detail);
  CHECK(report.pass());
  CHECK(report.items_checked > 20);

  const auto manifest = read_manifest(root / kManifestName);
  const auto registry = load_registry(root / "registry.json");
  auto by_item = triples_by_item(root);
  int blur = 0, copy = 0;
  for (const auto& e : manifest.items) {
    CHECK(oracle::verify_item(e, root).pass());
    const auto r = oracle::recompute_answers(e, by_item[e.record_id], registry, root);
    CHECK(r.mismatches.empty());
    CHECK(r.unverifiable.empty());
    blur += e.kind == ItemKind::blur;
    copy += e.kind == ItemKind::copy_move;
  }
  CHECK(blur > 0);
  CHECK(copy > 0);
}

TEST_CASE("stored direction answers match a naive recomputation") {
  const auto& root = testutil::small_dataset();
  const auto manifest = read_manifest(root / kManifestName, false);
  const auto registry = load_registry(root / "registry.json");
  auto by_item = triples_by_item(root);
  int direction_qid = 0;
  for (const auto& t : registry.templates)
    if (t.fact == FactKey::direction) direction_qid = t.qid;
  int checked = 0;
  for (const auto& e : manifest.items) {
    if (e.kind != ItemKind::copy_move) continue;
    const auto src = read_mask_png(root / e.files.at(Role::source));
    const auto tmp = read_mask_png(root / e.files.at(Role::tampering));
    for (const auto& t : by_item[e.record_id]) {
      if (t.qid != direction_qid) continue;
      CHECK(t.answer == naive_direction(src, tmp));
      ++checked;
    }
  }
  CHECK(checked > 0);
}

TEST_CASE("every catalogued fault is detected") {
  const auto list = faults::catalog();
  CHECK(list.size() >= 10);
  const auto base = testutil::scratch_dir("faults");
  int i = 0;
  for (const auto& fault : list) {
    CAPTURE(fault.name);
    const auto dir = base / std::to_string(i++);
    faults::clone_dataset(testutil::small_dataset(), dir);
    REQUIRE(oracle::verify_dataset(dir).pass());
    fault.inject(dir);
    const auto report = oracle::verify_dataset(dir);
    CHECK_FALSE(report.pass());
    CHECK(report.has_violation(fault.expected_rule));
  }
}

TEST_CASE("a flipped answer is exactly one mismatch") {
  const auto dir = testutil::scratch_dir("flip") / "ds";
  faults::clone_dataset(testutil::small_dataset(), dir);
  for (const auto& f : faults::catalog()) {
    if (f.name == "yes/no answer flipped") f.inject(dir);
  }
  const auto manifest = read_manifest(dir / kManifestName, false);
  const auto registry = load_registry(dir / "registry.json");
  auto by_item = triples_by_item(dir);
  std::size_t total = 0;
  for (const auto& e : manifest.items) total += oracle::recompute_answers(e, by_item[e.record_id], registry, dir).mismatches.size();
  CHECK(total == 1);
}

TEST_CASE("records without stored transforms are unverifiable, not wrong") {
  const auto dir = testutil::scratch_dir("manual") / "ds";
  faults::clone_dataset(testutil::small_dataset(), dir);
  auto manifest = read_manifest(dir / kManifestName, false);
  std::string stripped;
  for (auto& e : manifest.items) {
    if (e.kind == ItemKind::copy_move) {
      e.params.reset();
      stripped = e.record_id;
      break;
    }
  }
  write_manifest(manifest, dir / kManifestName);
  const auto report = oracle::verify_dataset(dir);
  CHECK(report.pass());
  int flagged = 0;
  for (const auto& w : report.warnings) flagged += w.item_id == stripped && w.rule_id == oracle::kUnverifiable;
  CHECK(flagged == 2);  // size relation and rotation
  CHECK_FALSE(oracle::verify_dataset(dir, {true}).pass());
}

TEST_CASE("a paste identical to the background is only a warning") {
  const auto dir = testutil::scratch_dir("degenerate") / "ds";
  faults::clone_dataset(testutil::small_dataset(), dir);
  const auto manifest = read_manifest(dir / kManifestName, false);
  for (const auto& e : manifest.items) {
    if (e.kind != ItemKind::copy_move) continue;
    // restore the original pixels: the item now changes nothing
    fs::copy_file(dir / e.files.at(Role::original), dir / e.files.at(Role::tampered), fs::copy_options::overwrite_existing);
    const auto report = oracle::verify_item(e, dir);
    CHECK(report.pass());
    CHECK(report.warnings.size() == 1);
    CHECK(report.warnings[0].rule_id == oracle::kDegeneratePaste);
    break;
  }
}

}  // TEST_SUITE
