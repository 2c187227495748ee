#pragma once

#include <cstdint>
#include <filesystem>

#include "rscm/raster.hpp"

namespace rscm {

/// 8-bit RGB PNG. Throws MissingFile, BadFormat.
RgbImage read_rgb_png(const std::filesystem::path& path);

/// 8-bit single-channel PNG, values passed through unchanged.
Plane<std::uint8_t> read_gray_png(const std::filesystem::path& path);

/// 8-bit single-channel PNG with values in {0, 255}; anything else is NonBinaryMask.
BinaryMask read_mask_png(const std::filesystem::path& path);

/// Writers use a fixed zlib level and filter so output bytes are reproducible.
void write_rgb_png(const std::filesystem::path& path, const RgbImage& image);
void write_gray_png(const std::filesystem::path& path, const Plane<std::uint8_t>& plane);
/// Stores set bits as 255.
void write_mask_png(const std::filesystem::path& path, const BinaryMask& mask);

}  // namespace rscm
