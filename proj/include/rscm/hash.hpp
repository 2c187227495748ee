#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>

namespace rscm {

std::string sha256_hex(std::span<const std::uint8_t> bytes);
std::string sha256_hex(std::string_view text);
/// Throws Errc::missing_file / Errc::io_failure.
std::string sha256_file(const std::filesystem::path& path);

}  // namespace rscm
