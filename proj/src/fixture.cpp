#include "rscm/fixture.hpp"

#include <cmath>
#include <string>

#include "rscm/png_io.hpp"
#include "rscm/rng.hpp"

namespace rscm {

namespace fs = std::filesystem;

namespace {

const std::vector<std::string> kFixtureThemes = {"urban", "rural", "harbor", "airport", "forest",
                                                 "industrial", "residential", "coastal"};

enum class Shape { rectangle, ellipse, triangle, lshape };

BinaryMask draw_shape(Shape shape, int cx, int cy, int rx, int ry) {
  BinaryMask mask(kImageSide, kImageSide);
  for (int y = cy - ry; y <= cy + ry; ++y) {
    for (int x = cx - rx; x <= cx + rx; ++x) {
      if (!mask.contains(x, y)) continue;
      const double u = static_cast<double>(x - cx) / rx;
      const double v = static_cast<double>(y - cy) / ry;
      bool inside = false;
      switch (shape) {
        case Shape::rectangle: inside = true; break;
        case Shape::ellipse: inside = u * u + v * v <= 1.0; break;
        case Shape::triangle: inside = std::abs(u) <= (v + 1.0) / 2.0; break;
        case Shape::lshape: inside = u <= 0.0 || v >= 0.0; break;
      }
      if (inside) mask.set(x, y);
    }
  }
  return mask;
}

bool collides(const BinaryMask& occupied, int cx, int cy, int rx, int ry, int margin) {
  for (int y = cy - ry - margin; y <= cy + ry + margin; ++y) {
    for (int x = cx - rx - margin; x <= cx + rx + margin; ++x) {
      if (occupied.contains(x, y) && occupied(x, y)) return true;
    }
  }
  return false;
}

void paint(RgbImage& image, const BinaryMask& mask, Rng& rng) {
  const std::array<int, 3> base = {static_cast<int>(rng.between(40, 215)), static_cast<int>(rng.between(40, 215)),
                                   static_cast<int>(rng.between(40, 215))};
  const int period = static_cast<int>(rng.between(3, 9));
  for (int y = 0; y < mask.height(); ++y) {
    for (int x = 0; x < mask.width(); ++x) {
      if (!mask(x, y)) continue;
      const int stripe = ((x + 2 * y) / period) % 2 == 0 ? 30 : -30;
      for (int c = 0; c < 3; ++c) {
        image.channels[c](y, x) = static_cast<std::uint8_t>(std::clamp(base[c] + stripe + static_cast<int>(rng.below(9)) - 4, 0, 255));
      }
    }
  }
}

ObjectClass non_road_class(int k) {
  static constexpr std::array<ObjectClass, 6> kCycle = {ObjectClass::building, ObjectClass::vehicle,
                                                        ObjectClass::ship,     ObjectClass::airplane,
                                                        ObjectClass::tree,     ObjectClass::farmland};
  return kCycle[static_cast<std::size_t>(k) % kCycle.size()];
}

}  // namespace

std::vector<CorpusItem> make_fixture_corpus(const fs::path& root, std::uint64_t seed,
                                            const FixtureOptions& options) {
  for (const char* dir : {"images", "semantic", "instances"}) fs::create_directories(root / dir);
  std::vector<CorpusItem> items;
  for (int i = 0; i < options.images; ++i) {
    char id_buf[32];
    std::snprintf(id_buf, sizeof id_buf, "img%04d", i);
    const std::string image_id = id_buf;
    Rng rng(derive_seed(seed, {"fixture", image_id}));

    RgbImage image(kImageSide, kImageSide);
    const double phase = rng.uniform(0.0, 6.28);
    for (int y = 0; y < kImageSide; ++y) {
      for (int x = 0; x < kImageSide; ++x) {
        const double wave = 20.0 * std::sin(x / 23.0 + phase) + 20.0 * std::cos(y / 31.0 - phase);
        const int noise = static_cast<int>(rng.below(17)) - 8;
        image.channels[0](y, x) = static_cast<std::uint8_t>(std::clamp(90 + static_cast<int>(wave) + noise + x / 16, 0, 255));
        image.channels[1](y, x) = static_cast<std::uint8_t>(std::clamp(110 + static_cast<int>(wave) + noise + y / 16, 0, 255));
        image.channels[2](y, x) = static_cast<std::uint8_t>(std::clamp(80 + noise + (x + y) / 24, 0, 255));
      }
    }
    Plane<std::uint8_t> semantic = Plane<std::uint8_t>::Zero(kImageSide, kImageSide);
    BinaryMask occupied(kImageSide, kImageSide);

    CorpusItem item;
    item.image_id = image_id;
    item.theme = kFixtureThemes[rng.below(kFixtureThemes.size())];
    item.image_path = root / "images" / (image_id + ".png");
    item.semantic_mask_path = root / "semantic" / (image_id + ".png");

    std::vector<std::pair<CorpusInstance, BinaryMask>> instances;
    const auto add = [&](ObjectClass cls, BinaryMask mask) {
      CorpusInstance inst;
      inst.instance_id = "obj" + std::to_string(instances.size());
      inst.class_label = cls;
      inst.mask_path = root / "instances" / (image_id + "_" + inst.instance_id + ".png");
      paint(image, mask, rng);
      semantic = semantic.max((mask.bits() * static_cast<std::uint8_t>(static_cast<int>(cls) + 1)).eval());
      occupied = BinaryMask::from_plane(occupied.bits() + mask.bits());
      instances.emplace_back(std::move(inst), std::move(mask));
    };

    // Road: a band crossing the whole frame.
    {
      const bool horizontal = rng.bernoulli(0.5);
      const int thickness = static_cast<int>(rng.between(10, 18));
      const int offset = static_cast<int>(rng.between(60, kImageSide - 60 - thickness));
      BinaryMask road(kImageSide, kImageSide);
      for (int a = 0; a < kImageSide; ++a) {
        for (int b = offset; b < offset + thickness; ++b) {
          if (horizontal) {
            road.set(a, b);
          } else {
            road.set(b, a);
          }
        }
      }
      add(ObjectClass::road, std::move(road));
    }

    int drawn = 0;
    for (int attempt = 0; drawn < options.objects_per_image - 1 && attempt < 500; ++attempt) {
      const int rx = static_cast<int>(rng.between(10, 45));
      const int ry = static_cast<int>(rng.between(10, 45));
      const int cx = static_cast<int>(rng.between(rx + 4, kImageSide - rx - 5));
      const int cy = static_cast<int>(rng.between(ry + 4, kImageSide - ry - 5));
      if (collides(occupied, cx, cy, rx, ry, 6)) continue;
      const auto shape = static_cast<Shape>(rng.below(4));
      add(non_road_class(drawn), draw_shape(shape, cx, cy, rx, ry));
      ++drawn;
    }

    if (options.include_ineligible) {
      for (int attempt = 0; attempt < 500; ++attempt) {
        const int cx = static_cast<int>(rng.between(20, kImageSide - 20));
        const int cy = static_cast<int>(rng.between(20, kImageSide - 20));
        if (collides(occupied, cx, cy, 4, 4, 4)) continue;
        add(ObjectClass::vehicle, draw_shape(Shape::rectangle, cx, cy, 4, 4));  // 81 px: too small
        break;
      }
      for (int attempt = 0; attempt < 500; ++attempt) {
        const int cy = static_cast<int>(rng.between(30, kImageSide - 30));
        if (collides(occupied, 12, cy, 12, 14, 4)) continue;
        add(ObjectClass::building, draw_shape(Shape::rectangle, 12, cy, 12, 14));  // touches left edge
        break;
      }
    }

    write_rgb_png(item.image_path, image);
    write_gray_png(item.semantic_mask_path, semantic);
    for (auto& [inst, mask] : instances) {
      write_mask_png(inst.mask_path, mask);
      item.instances.push_back(std::move(inst));
    }
    items.push_back(std::move(item));
  }
  write_corpus_index(root, items);
  return items;
}

}  // namespace rscm
