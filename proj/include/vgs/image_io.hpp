// Copyright 2026 The VGS Decoding Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "vgs/image.hpp"

namespace vgs {

// Dispatches on extension: .png, .pgm/.ppm (binary or ASCII), .f32 (raw float32).
// Intensities are normalized by 255 for 8-bit formats.
Image load_image(const std::filesystem::path& path, const std::string& id);

std::vector<std::uint8_t> encode_png(const Image& image);
Image decode_png(const std::vector<std::uint8_t>& bytes, const std::string& id = {});

// Raw float32 fixture format: little-endian int32 width, height, channels, then
// width*height*channels little-endian float32 pixels.
void write_f32(const std::filesystem::path& path, const Image& image);
Image read_f32(const std::filesystem::path& path, const std::string& id);

Image read_pnm(const std::filesystem::path& path, const std::string& id);

}  // namespace vgs
