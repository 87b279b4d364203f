#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "rlfc/plane.hpp"

namespace rlfc {

// PNG via libpng. Reading accepts 8-bit gray/palette/RGB(A); gray and palette
// are expanded to RGB and alpha is dropped. 16-bit color input is rejected.
RgbImage read_png_rgb(const std::filesystem::path& path);
RgbImage decode_png_rgb(std::span<const std::uint8_t> bytes);
std::vector<std::uint8_t> encode_png_rgb(const RgbImage& image);
void write_png_rgb(const std::filesystem::path& path, const RgbImage& image);

/// Single-channel PNG; 8-bit when every sample fits a byte, 16-bit otherwise.
std::vector<std::uint8_t> encode_png_gray(const Plane16& plane);
Plane16 decode_png_gray(std::span<const std::uint8_t> bytes);

std::vector<std::uint8_t> read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, std::span<const std::uint8_t> bytes);

}  // namespace rlfc
