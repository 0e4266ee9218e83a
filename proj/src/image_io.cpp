// Copyright 2026 The VGS Decoding Authors
// SPDX-License-Identifier: Apache-2.0

#include "vgs/image_io.hpp"

#include <png.h>

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <iterator>
#include <sstream>

#include "vgs/errors.hpp"

namespace vgs {

namespace {

std::vector<std::uint8_t> read_all(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InvalidInput("cannot open image file " + path.string());
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

std::uint32_t load_le32(const std::uint8_t* p) {
  return static_cast<std::uint32_t>(p[0]) | static_cast<std::uint32_t>(p[1]) << 8 |
         static_cast<std::uint32_t>(p[2]) << 16 | static_cast<std::uint32_t>(p[3]) << 24;
}

void store_le32(std::uint32_t v, std::ostream& out) {
  const char bytes[4] = {static_cast<char>(v & 0xff), static_cast<char>((v >> 8) & 0xff),
                         static_cast<char>((v >> 16) & 0xff), static_cast<char>((v >> 24) & 0xff)};
  out.write(bytes, 4);
}

Image from_bytes(int width, int height, int channels, const std::uint8_t* data, std::size_t max_value,
                 const std::string& id) {
  const Eigen::Index n = static_cast<Eigen::Index>(width) * height * channels;
  Eigen::ArrayXd pixels(n);
  for (Eigen::Index i = 0; i < n; ++i) pixels[i] = static_cast<double>(data[i]) / static_cast<double>(max_value);
  return Image(width, height, channels, std::move(pixels), id);
}

}  // namespace

Image decode_png(const std::vector<std::uint8_t>& bytes, const std::string& id) {
  png_image png;
  std::memset(&png, 0, sizeof(png));
  png.version = PNG_IMAGE_VERSION;
  if (!png_image_begin_read_from_memory(&png, bytes.data(), bytes.size())) {
    throw InvalidInput(std::string("png decode failed: ") + png.message);
  }
  const bool color = (png.format & PNG_FORMAT_FLAG_COLOR) != 0;
  png.format = color ? PNG_FORMAT_RGB : PNG_FORMAT_GRAY;
  std::vector<std::uint8_t> buffer(PNG_IMAGE_SIZE(png));
  if (!png_image_finish_read(&png, nullptr, buffer.data(), 0, nullptr)) {
    std::string message = png.message;
    png_image_free(&png);
    throw InvalidInput("png decode failed: " + message);
  }
  return from_bytes(static_cast<int>(png.width), static_cast<int>(png.height), color ? 3 : 1,
                    buffer.data(), 255, id);
}

std::vector<std::uint8_t> encode_png(const Image& image) {
  if (image.channels() != 1 && image.channels() != 3) {
    throw InvalidInput("png encoding supports 1 or 3 channels");
  }
  std::vector<std::uint8_t> raw(static_cast<std::size_t>(image.pixel_count()));
  for (Eigen::Index i = 0; i < image.pixel_count(); ++i) {
    raw[static_cast<std::size_t>(i)] = static_cast<std::uint8_t>(std::lround(image.pixels()[i] * 255.0));
  }
  png_image png;
  std::memset(&png, 0, sizeof(png));
  png.version = PNG_IMAGE_VERSION;
  png.width = static_cast<png_uint_32>(image.width());
  png.height = static_cast<png_uint_32>(image.height());
  png.format = image.channels() == 3 ? PNG_FORMAT_RGB : PNG_FORMAT_GRAY;

  png_alloc_size_t size = 0;
  if (!png_image_write_to_memory(&png, nullptr, &size, 0, raw.data(), 0, nullptr)) {
    throw InvalidInput(std::string("png encode failed: ") + png.message);
  }
  std::vector<std::uint8_t> out(size);
  if (!png_image_write_to_memory(&png, out.data(), &size, 0, raw.data(), 0, nullptr)) {
    throw InvalidInput(std::string("png encode failed: ") + png.message);
  }
  out.resize(size);
  return out;
}

Image read_pnm(const std::filesystem::path& path, const std::string& id) {
  const auto bytes = read_all(path);
  std::size_t pos = 0;
  // Header tokens may be separated by whitespace and '#' comments.
  auto next_token = [&]() {
    std::string tok;
    while (pos < bytes.size()) {
      const char c = static_cast<char>(bytes[pos]);
      if (c == '#') {
        while (pos < bytes.size() && bytes[pos] != '\n') ++pos;
      } else if (std::isspace(static_cast<unsigned char>(c))) {
        if (!tok.empty()) break;
        ++pos;
      } else {
        tok.push_back(c);
        ++pos;
      }
    }
    if (tok.empty()) throw InvalidInput("truncated pnm header in " + path.string());
    return tok;
  };
  const std::string magic = next_token();
  int channels = 0;
  bool binary = false;
  if (magic == "P5") { channels = 1; binary = true; }
  else if (magic == "P6") { channels = 3; binary = true; }
  else if (magic == "P2") { channels = 1; }
  else if (magic == "P3") { channels = 3; }
  else throw InvalidInput("unsupported pnm magic '" + magic + "' in " + path.string());

  const int width = std::stoi(next_token());
  const int height = std::stoi(next_token());
  const int max_value = std::stoi(next_token());
  if (max_value <= 0 || max_value > 255) throw InvalidInput("only 8-bit pnm files are supported");

  const std::size_t n = static_cast<std::size_t>(width) * height * channels;
  std::vector<std::uint8_t> data(n);
  if (binary) {
    ++pos;  // single whitespace after maxval
    if (bytes.size() < pos + n) throw InvalidInput("truncated pnm data in " + path.string());
    std::copy_n(bytes.begin() + static_cast<std::ptrdiff_t>(pos), n, data.begin());
  } else {
    for (std::size_t i = 0; i < n; ++i) data[i] = static_cast<std::uint8_t>(std::stoi(next_token()));
  }
  return from_bytes(width, height, channels, data.data(), static_cast<std::size_t>(max_value), id);
}

void write_f32(const std::filesystem::path& path, const Image& image) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InvalidInput("cannot write image file " + path.string());
  store_le32(static_cast<std::uint32_t>(image.width()), out);
  store_le32(static_cast<std::uint32_t>(image.height()), out);
  store_le32(static_cast<std::uint32_t>(image.channels()), out);
  for (Eigen::Index i = 0; i < image.pixel_count(); ++i) {
    const float f = static_cast<float>(image.pixels()[i]);
    store_le32(std::bit_cast<std::uint32_t>(f), out);
  }
}

Image read_f32(const std::filesystem::path& path, const std::string& id) {
  const auto bytes = read_all(path);
  if (bytes.size() < 12) throw InvalidInput("truncated f32 header in " + path.string());
  const auto width = static_cast<std::int32_t>(load_le32(bytes.data()));
  const auto height = static_cast<std::int32_t>(load_le32(bytes.data() + 4));
  const auto channels = static_cast<std::int32_t>(load_le32(bytes.data() + 8));
  if (width <= 0 || height <= 0 || channels <= 0) throw InvalidInput("bad f32 dimensions in " + path.string());
  const std::size_t n = static_cast<std::size_t>(width) * height * channels;
  if (bytes.size() != 12 + 4 * n) throw InvalidInput("f32 payload size mismatch in " + path.string());
  Eigen::ArrayXd pixels(static_cast<Eigen::Index>(n));
  for (std::size_t i = 0; i < n; ++i) {
    pixels[static_cast<Eigen::Index>(i)] = std::bit_cast<float>(load_le32(bytes.data() + 12 + 4 * i));
  }
  return Image(width, height, channels, std::move(pixels), id);
}

Image load_image(const std::filesystem::path& path, const std::string& id) {
  std::string ext = path.extension().string();
  std::transform(ext.begin(), ext.end(), ext.begin(), [](unsigned char c) { return std::tolower(c); });
  if (ext == ".png") return decode_png(read_all(path), id);
  if (ext == ".pgm" || ext == ".ppm" || ext == ".pnm") return read_pnm(path, id);
  if (ext == ".f32") return read_f32(path, id);
  throw InvalidInput("unsupported image format '" + ext + "' for " + path.string());
}

}  // namespace vgs
