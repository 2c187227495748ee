#include <cmath>

#include "doctest.h"
#include "helpers.hpp"
#include "rscm/rasterops.hpp"
#include "rscm/tamper.hpp"

using namespace rscm;
using testutil::instance;
using testutil::noise_image;
using testutil::rect_mask;

namespace {

bool subset(const BinaryMask& a, const BinaryMask& b) {
  for (int y = 0; y < a.height(); ++y)
    for (int x = 0; x < a.width(); ++x)
      if (a(x, y) && !b(x, y)) return false;
  return true;
}

std::int64_t naive_and(const BinaryMask& a, const BinaryMask& b) {
  std::int64_t n = 0;
  for (int y = 0; y < a.height(); ++y)
    for (int x = 0; x < a.width(); ++x) n += a(x, y) && b(x, y);
  return n;
}

}  // namespace

TEST_SUITE("tamper") {

TEST_CASE("eligibility examples") {
  const ImageSize img{512, 512};
  // 162 x 162 = 26244 px, ratio 0.1001
  auto building = instance(rect_mask(512, 512, 100, 100, 162, 162));
  CHECK(check_eligibility(building, img).eligible());

  // 10 x 13 = 130 px, ratio 0.000496
  auto vehicle = instance(rect_mask(512, 512, 200, 200, 10, 13), ObjectClass::vehicle);
  CHECK(check_eligibility(vehicle, img).rejected == RejectReason::too_small);

  // 256 x 51 = 13056 px, ratio 0.0498, touching the left edge
  auto road = instance(rect_mask(512, 512, 0, 300, 256, 51), ObjectClass::road);
  CHECK(check_eligibility(road, img).eligible());
  auto shed = instance(rect_mask(512, 512, 0, 300, 256, 51), ObjectClass::building);
  CHECK(check_eligibility(shed, img).rejected == RejectReason::touches_border);
}

TEST_CASE("eligibility bounds are inclusive") {
  const ImageSize img{100, 100};
  CHECK(check_eligibility(instance(rect_mask(100, 100, 10, 10, 10, 1)), img).eligible());     // 0.001
  CHECK(check_eligibility(instance(rect_mask(100, 100, 10, 10, 9, 1)), img).rejected == RejectReason::too_small);
  CHECK(check_eligibility(instance(rect_mask(100, 100, 10, 10, 50, 30)), img).eligible());    // 0.15
  CHECK(check_eligibility(instance(rect_mask(100, 100, 10, 10, 50, 30)), img).eligible());
  auto big = rect_mask(100, 100, 10, 10, 50, 30);
  big.set(10, 40);
  CHECK(check_eligibility(instance(big), img).rejected == RejectReason::too_large);
  auto split = rect_mask(100, 100, 10, 10, 5, 5);
  for (int y = 30; y < 35; ++y)
    for (int x = 30; x < 35; ++x) split.set(x, y);
  CHECK(check_eligibility(instance(split), img).rejected == RejectReason::fragmented);
  CHECK_THROWS_AS(check_eligibility(instance(rect_mask(50, 50, 5, 5, 5, 5)), img), Error);
}

TEST_CASE("sampler is deterministic per seed") {
  for (std::uint64_t s : {0ull, 1ull, 99ull}) {
    Rng a(s), b(s);
    for (int i = 0; i < 50; ++i) {
      CHECK(sample_params(a, TamperKind::copy_move) == sample_params(b, TamperKind::copy_move));
      CHECK(sample_params(a, TamperKind::blur) == sample_params(b, TamperKind::blur));
    }
  }
}

TEST_CASE("sampler statistics over 10000 draws") {
  Rng rng(2024);
  int no_rotation = 0, unit_scale = 0;
  for (int i = 0; i < 10000; ++i) {
    const auto p = sample_params(rng, TamperKind::copy_move);
    REQUIRE(p.scale >= 0.5);
    REQUIRE(p.scale <= 1.5);
    REQUIRE(p.rotation_deg >= 0.0);
    REQUIRE(p.rotation_deg < 360.0);
    REQUIRE_FALSE(p.blur_kind.has_value());
    if (p.rotation_deg == 0.0) {
      ++no_rotation;
    } else {
      REQUIRE(p.rotation_deg >= 5.0);
      REQUIRE(p.rotation_deg <= 355.0);
    }
    if (p.scale == 1.0) ++unit_scale;
  }
  CHECK(no_rotation / 10000.0 >= 0.47);
  CHECK(no_rotation / 10000.0 <= 0.53);
  CHECK(unit_scale / 10000.0 == doctest::Approx(1.0 / 3.0).epsilon(0.05));

  std::array<int, 3> kinds{};
  for (int i = 0; i < 9000; ++i) {
    const auto p = sample_params(rng, TamperKind::blur);
    REQUIRE(p.blur_kind.has_value());
    ++kinds[static_cast<int>(*p.blur_kind)];
    switch (*p.blur_kind) {
      case BlurKind::gaussian:
        REQUIRE(p.blur_strength >= 2.0);
        REQUIRE(p.blur_strength <= 6.0);
        break;
      case BlurKind::mosaic:
        REQUIRE((p.blur_strength == 8 || p.blur_strength == 16 || p.blur_strength == 32));
        break;
      case BlurKind::daub:
        REQUIRE(p.blur_strength == 4);
        break;
    }
  }
  for (int k : kinds) CHECK(k == doctest::Approx(3000).epsilon(0.06));
}

TEST_CASE("an instance covering the whole image cannot be placed") {
  BinaryMask full(64, 64);
  for (int y = 0; y < 64; ++y)
    for (int x = 0; x < 64; ++x) full.set(x, y);
  const auto inst = instance(full);
  Rng rng(1);
  PlaceOptions opt;
  opt.enforce_eligibility = false;
  CHECK_FALSE(place(inst, TamperParams{}, {64, 64}, rng, opt).has_value());
  // with eligibility on, the same call is refused outright
  try {
    place(inst, TamperParams{}, {64, 64}, rng);
    FAIL("expected throw");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::ineligible_instance);
  }
}

TEST_CASE("10x10 square in an empty 512x512 frame") {
  // 100 px is below the 0.1% area floor, so eligibility is switched off here
  const auto inst = instance(rect_mask(512, 512, 250, 250, 10, 10));
  CHECK(check_eligibility(inst, {512, 512}).rejected == RejectReason::too_small);
  Rng rng(5);
  PlaceOptions opt;
  opt.enforce_eligibility = false;
  const auto placed = place(inst, TamperParams{}, {512, 512}, rng, opt);
  REQUIRE(placed.has_value());
  CHECK(placed->footprint.count() == 100);
  CHECK(naive_and(inst.mask, placed->footprint) == 0);
  CHECK(overlap_fraction(inst.mask, placed->footprint) == 0.0);
  CHECK_FALSE(region_stats(placed->footprint).bbox.touches_border({512, 512}));
}

TEST_CASE("a translation giving 6 percent overlap is rejected") {
  // 10 x 50 = 500 px; a vertical shift of 47 leaves 3 shared rows = 30 px = 6%
  const auto inst = instance(rect_mask(200, 200, 50, 20, 10, 50));
  const auto fp = transform_footprint(inst, 1.0, 0.0);
  const auto six = evaluate_translation(inst, fp, {0, 47});
  CHECK(six.overlap == doctest::Approx(0.06));
  CHECK(six.inside);
  CHECK_FALSE(six.accepted);
  const auto four = evaluate_translation(inst, fp, {0, 48});
  CHECK(four.overlap == doctest::Approx(0.04));
  CHECK(four.accepted);
  // exactly 5% is allowed
  const auto five = evaluate_translation(inst, fp, {5, 45});
  CHECK(five.overlap == doctest::Approx(0.05));
  CHECK(five.accepted);
}

TEST_CASE("non-road footprints stay off the border while roads may be clipped") {
  const auto inst = instance(rect_mask(200, 200, 50, 50, 20, 20));
  const auto fp = transform_footprint(inst, 1.0, 0.0);
  CHECK_FALSE(evaluate_translation(inst, fp, {-50, 0}).accepted);  // bbox at x = 0
  CHECK(evaluate_translation(inst, fp, {-49, 0}).accepted);
  auto road = inst;
  road.class_label = ObjectClass::road;
  CHECK(evaluate_translation(road, fp, {-55, 0}).accepted);  // 75% visible
  CHECK_FALSE(evaluate_translation(road, fp, {-65, 0}).accepted);  // 25% visible
}

TEST_CASE("identity copy-move onto its own source leaves the image unchanged") {
  const auto img = noise_image(64, 64, 11);
  const auto inst = instance(rect_mask(64, 64, 10, 12, 20, 7));
  Placement p;
  p.footprint = inst.mask;
  const auto out = apply_copy_move(img, inst, TamperParams{}, p);
  CHECK(out.tampered == img);
  CHECK(out.src_mask == inst.mask);
  CHECK(out.tmp_mask == inst.mask);
}

TEST_CASE("copy-move diff support stays inside the tampering mask") {
  const auto img = noise_image(128, 128, 3);
  Rng shapes(8);
  int accepted = 0;
  for (int trial = 0; trial < 200; ++trial) {
    const int w = static_cast<int>(shapes.between(4, 30)), h = static_cast<int>(shapes.between(4, 30));
    const int x0 = static_cast<int>(shapes.between(1, 126 - w)), y0 = static_cast<int>(shapes.between(1, 126 - h));
    auto mask = rect_mask(128, 128, x0, y0, w, h);
    // carve a notch so the shape is not symmetric
    for (int y = y0; y < y0 + h / 2; ++y) mask.set(x0, y, false);
    const auto inst = instance(mask);
    if (!check_eligibility(inst, {128, 128}).eligible()) continue;
    Rng rng(derive_seed(1, {"trial", std::to_string(trial)}));
    const auto outcome = tamper_copy_move(img, inst, rng);
    if (!outcome) continue;
    ++accepted;
    const auto& rec = outcome->record;
    const auto diff = diff_support(img, outcome->tampered);
    REQUIRE(subset(diff, rec.tmp_mask));
    REQUIRE(rec.src_mask == inst.mask);
    const double overlap = static_cast<double>(naive_and(rec.src_mask, rec.tmp_mask)) / rec.src_mask.count();
    REQUIRE(overlap <= 0.05);
    REQUIRE_FALSE(region_stats(rec.tmp_mask).bbox.touches_border({128, 128}));
    REQUIRE(rec.params.scale >= 0.5);
    REQUIRE(rec.params.scale <= 1.5);
  }
  CHECK(accepted > 100);
}

TEST_CASE("copy-move replay is bit-identical") {
  const auto img = noise_image(128, 128, 4);
  const auto inst = instance(rect_mask(128, 128, 30, 40, 25, 12));
  Rng a(42), b(42);
  const auto x = tamper_copy_move(img, inst, a);
  const auto y = tamper_copy_move(img, inst, b);
  REQUIRE(x.has_value());
  REQUIRE(y.has_value());
  CHECK(x->tampered == y->tampered);
  CHECK(x->record.tmp_mask == y->record.tmp_mask);
  CHECK(x->record.params == y->record.params);
}

TEST_CASE("a 90 degree rotation swaps bounding box dimensions") {
  // asymmetric L shape: 40 wide, 12 tall, with a leg
  auto mask = rect_mask(200, 200, 60, 90, 40, 6);
  for (int y = 96; y < 102; ++y)
    for (int x = 60; x < 66; ++x) mask.set(x, y);
  const auto inst = instance(mask);
  const auto src = region_stats(mask).bbox;
  const auto fp = transform_footprint(inst, 1.0, 90.0);
  CHECK(std::abs(fp.bbox.width() - src.height()) <= 1);
  CHECK(std::abs(fp.bbox.height() - src.width()) <= 1);
  CHECK(static_cast<std::int64_t>(fp.pixels.size()) == doctest::Approx(mask.count()).epsilon(0.05));
}

TEST_CASE("blurring a constant region changes nothing") {
  RgbImage img(96, 96);
  for (int y = 0; y < 96; ++y)
    for (int x = 0; x < 96; ++x) img.set_pixel(x, y, {200, 30, 90});
  // different colour outside the region must not leak in
  for (int y = 0; y < 96; ++y)
    for (int x = 0; x < 20; ++x) img.set_pixel(x, y, {0, 255, 0});
  auto mask = rect_mask(96, 96, 20, 20, 50, 40);
  const auto inst = instance(mask);
  for (auto kind : kBlurKinds) {
    for (double strength : {2.0, 4.0, 6.0, 16.0}) {
      if (kind == BlurKind::gaussian && strength > 6.0) continue;
      const auto out = apply_blur(img, inst, kind, strength);
      CHECK(out.tampered == img);
      CHECK(out.region_mask == mask);
    }
  }
}

TEST_CASE("mosaic blocks on a checkerboard take the block mean") {
  RgbImage img(128, 128);
  for (int y = 0; y < 128; ++y)
    for (int x = 0; x < 128; ++x)
      img.set_pixel(x, y, ((x + y) % 2) ? std::array<std::uint8_t, 3>{250, 10, 100}
                                         : std::array<std::uint8_t, 3>{31, 200, 7});
  // block-aligned region: four complete 16 x 16 blocks plus a ragged strip
  auto mask = rect_mask(128, 128, 32, 32, 32, 32);
  for (int y = 64; y < 70; ++y)
    for (int x = 32; x < 50; ++x) mask.set(x, y);
  const auto out = apply_blur(img, instance(mask), BlurKind::mosaic, 16);
  for (int by = 32; by < 64; by += 16) {
    for (int bx = 32; bx < 64; bx += 16) {
      std::array<long, 3> sum{};
      for (int y = by; y < by + 16; ++y)
        for (int x = bx; x < bx + 16; ++x)
          for (int c = 0; c < 3; ++c) sum[c] += img.channels[c](y, x);
      for (int y = by; y < by + 16; ++y)
        for (int x = bx; x < bx + 16; ++x)
          for (int c = 0; c < 3; ++c)
            REQUIRE(out.tampered.channels[c](y, x) == static_cast<int>(std::floor(sum[c] / 256.0 + 0.5)));
    }
  }
  CHECK(out.tampered.pixel(40, 40) == std::array<std::uint8_t, 3>{141, 105, 54});
  CHECK(subset(diff_support(img, out.tampered), mask));
}

TEST_CASE("blur changes only the region and reports it as both masks") {
  const auto img = noise_image(128, 128, 21);
  auto mask = rect_mask(128, 128, 30, 30, 40, 25);
  const auto inst = instance(mask);
  Rng rng(9);
  for (int i = 0; i < 12; ++i) {
    const auto outcome = tamper_blur(img, inst, rng);
    CHECK(outcome.record.src_mask == outcome.record.tmp_mask);
    CHECK(outcome.record.src_mask == mask);
    CHECK(subset(diff_support(img, outcome.tampered), mask));
    CHECK_FALSE(outcome.record.degenerate);
  }
}

TEST_CASE("gaussian blur ignores pixels outside the region") {
  // region is a uniform patch; the outside is white, so any leak would brighten the edge
  RgbImage img(64, 64);
  for (int y = 0; y < 64; ++y)
    for (int x = 0; x < 64; ++x) img.set_pixel(x, y, {255, 255, 255});
  auto mask = rect_mask(64, 64, 20, 20, 10, 10);
  for (int y = 20; y < 30; ++y)
    for (int x = 20; x < 30; ++x) img.set_pixel(x, y, {static_cast<std::uint8_t>(x * 4), 10, 10});
  const auto out = apply_blur(img, instance(mask), BlurKind::gaussian, 3.0);
  for (int y = 20; y < 30; ++y)
    for (int x = 20; x < 30; ++x) {
      CHECK(out.tampered.channels[1](y, x) == 10);
      CHECK(out.tampered.channels[0](y, x) >= 80);
      CHECK(out.tampered.channels[0](y, x) <= 116);
    }
}

TEST_CASE("daub picks the most populated intensity bin") {
  RgbImage img(32, 32);
  auto mask = rect_mask(32, 32, 5, 5, 9, 9);
  for (int y = 0; y < 32; ++y)
    for (int x = 0; x < 32; ++x) img.set_pixel(x, y, {20, 20, 20});
  img.set_pixel(9, 9, {250, 250, 250});  // a lone bright pixel in a dark region
  const auto out = apply_blur(img, instance(mask), BlurKind::daub, 4);
  CHECK(out.tampered.pixel(9, 9) == std::array<std::uint8_t, 3>{20, 20, 20});
}

TEST_CASE("unknown blur kind") {
  const auto img = noise_image(32, 32, 1);
  const auto inst = instance(rect_mask(32, 32, 5, 5, 5, 5));
  try {
    apply_blur(img, inst, "motion", 3.0);
    FAIL("expected throw");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::unknown_blur_kind);
  }
  CHECK_NOTHROW(apply_blur(img, inst, "mosaic", 8.0));
}

}  // TEST_SUITE
