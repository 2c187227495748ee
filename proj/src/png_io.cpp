#include "rscm/png_io.hpp"

#include <csetjmp>
#include <cstdio>
#include <memory>
#include <vector>

#include <png.h>

namespace rscm {

namespace {

constexpr int kCompressionLevel = 1;

struct FileCloser {
  void operator()(std::FILE* f) const { std::fclose(f); }
};
using FilePtr = std::unique_ptr<std::FILE, FileCloser>;

struct DecodedPng {
  int width = 0;
  int height = 0;
  int channels = 0;
  std::vector<std::uint8_t> pixels;
};

DecodedPng decode(const std::filesystem::path& path, png_uint_32 expected_format) {
  if (!std::filesystem::exists(path)) throw Error(Errc::missing_file, path.string());
  png_image image{};
  image.version = PNG_IMAGE_VERSION;
  if (png_image_begin_read_from_file(&image, path.c_str()) == 0) {
    const std::string msg = image.message;
    png_image_free(&image);
    throw Error(Errc::bad_format, path.string() + ": " + msg);
  }
  if (image.format != expected_format) {
    png_image_free(&image);
    throw Error(Errc::bad_format, path.string() + ": unexpected pixel format");
  }
  DecodedPng out;
  out.width = static_cast<int>(image.width);
  out.height = static_cast<int>(image.height);
  out.channels = static_cast<int>(PNG_IMAGE_SAMPLE_CHANNELS(image.format));
  out.pixels.resize(PNG_IMAGE_SIZE(image));
  if (png_image_finish_read(&image, nullptr, out.pixels.data(), 0, nullptr) == 0) {
    const std::string msg = image.message;
    png_image_free(&image);
    throw Error(Errc::bad_format, path.string() + ": " + msg);
  }
  return out;
}

// Rows must outlive the call; libpng longjmps back here on failure.
bool encode_rows(std::FILE* fp, int width, int height, int color_type,
                 const std::vector<png_bytep>& rows) {
  png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
  if (png == nullptr) return false;
  png_infop info = png_create_info_struct(png);
  if (info == nullptr) {
    png_destroy_write_struct(&png, nullptr);
    return false;
  }
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_write_struct(&png, &info);
    return false;
  }
  png_init_io(png, fp);
  png_set_compression_level(png, kCompressionLevel);
  png_set_filter(png, PNG_FILTER_TYPE_BASE, PNG_FILTER_SUB);
  png_set_IHDR(png, info, static_cast<png_uint_32>(width), static_cast<png_uint_32>(height), 8,
               color_type, PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT,
               PNG_FILTER_TYPE_DEFAULT);
  png_write_info(png, info);
  png_write_image(png, const_cast<png_bytepp>(rows.data()));
  png_write_end(png, nullptr);
  png_destroy_write_struct(&png, &info);
  return true;
}

void encode(const std::filesystem::path& path, int width, int height, int channels,
            std::vector<std::uint8_t>& pixels) {
  std::vector<png_bytep> rows(static_cast<std::size_t>(height));
  for (int y = 0; y < height; ++y) {
    rows[y] = pixels.data() + static_cast<std::size_t>(y) * width * channels;
  }
  FilePtr fp(std::fopen(path.c_str(), "wb"));
  if (!fp) throw Error(Errc::io_failure, "cannot open for writing: " + path.string());
  const int color_type = channels == 3 ? PNG_COLOR_TYPE_RGB : PNG_COLOR_TYPE_GRAY;
  if (!encode_rows(fp.get(), width, height, color_type, rows)) {
    throw Error(Errc::io_failure, "png encode failed: " + path.string());
  }
  if (std::fflush(fp.get()) != 0) throw Error(Errc::io_failure, "flush failed: " + path.string());
}

}  // namespace

RgbImage read_rgb_png(const std::filesystem::path& path) {
  const DecodedPng png = decode(path, PNG_FORMAT_RGB);
  RgbImage image(png.width, png.height);
  std::size_t i = 0;
  for (int y = 0; y < png.height; ++y) {
    for (int x = 0; x < png.width; ++x) {
      for (int c = 0; c < 3; ++c) image.channels[c](y, x) = png.pixels[i++];
    }
  }
  return image;
}

Plane<std::uint8_t> read_gray_png(const std::filesystem::path& path) {
  const DecodedPng png = decode(path, PNG_FORMAT_GRAY);
  return Eigen::Map<const Plane<std::uint8_t>>(png.pixels.data(), png.height, png.width);
}

BinaryMask read_mask_png(const std::filesystem::path& path) {
  const Plane<std::uint8_t> plane = read_gray_png(path);
  if (!((plane == 0) || (plane == 255)).all()) {
    throw Error(Errc::non_binary_mask, path.string() + ": values other than 0/255");
  }
  return BinaryMask::from_plane(plane);
}

void write_rgb_png(const std::filesystem::path& path, const RgbImage& image) {
  std::vector<std::uint8_t> pixels(static_cast<std::size_t>(image.width()) * image.height() * 3);
  std::size_t i = 0;
  for (int y = 0; y < image.height(); ++y) {
    for (int x = 0; x < image.width(); ++x) {
      for (int c = 0; c < 3; ++c) pixels[i++] = image.channels[c](y, x);
    }
  }
  encode(path, image.width(), image.height(), 3, pixels);
}

void write_gray_png(const std::filesystem::path& path, const Plane<std::uint8_t>& plane) {
  std::vector<std::uint8_t> pixels(static_cast<std::size_t>(plane.size()));
  Eigen::Map<Plane<std::uint8_t>>(pixels.data(), plane.rows(), plane.cols()) = plane;
  encode(path, static_cast<int>(plane.cols()), static_cast<int>(plane.rows()), 1, pixels);
}

void write_mask_png(const std::filesystem::path& path, const BinaryMask& mask) {
  write_gray_png(path, (mask.bits() * std::uint8_t{255}).eval());
}

}  // namespace rscm
