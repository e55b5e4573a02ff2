#pragma once

#include "camo/types.hpp"

#include <filesystem>
#include <optional>

namespace camo
{

struct Dims
{
  int width = 0;
  int height = 0;
  bool operator==(const Dims&) const = default;
};

template <typename Derived>
Dims dims_of(const Eigen::ArrayBase<Derived>& a)
{
  return {static_cast<int>(a.cols()), static_cast<int>(a.rows())};
}

/// Raw single-channel samples plus their bit depth (8 or 16).
struct GrayImage
{
  Image<std::uint16_t> samples;
  int bit_depth = 8;

  double max_value() const { return bit_depth == 16 ? 65535.0 : 255.0; }
};

struct RgbImage
{
  int width = 0;
  int height = 0;
  /// Interleaved RGB, row-major.
  std::vector<std::uint8_t> data;

  std::uint8_t at(int x, int y, int channel) const
  {
    return data[(static_cast<std::size_t>(y) * width + x) * 3 + channel];
  }
};

GrayImage read_gray_png(const std::filesystem::path& path);

/// Gray map scaled into [0,1] by the bit-depth maximum.
ScalarMap load_scalar_map(const std::filesystem::path& path, std::optional<Dims> expected = std::nullopt);

/// pixel > bit-depth midpoint -> 1.
BinaryMask load_mask(const std::filesystem::path& path, std::optional<Dims> expected = std::nullopt);

/// RGB loader for PNG (gray/RGB/RGBA/palette, expanded to 8-bit RGB) and JPEG.
RgbImage load_rgb(const std::filesystem::path& path, std::optional<Dims> expected = std::nullopt);

void write_gray_png(const std::filesystem::path& path, const Image<std::uint8_t>& pixels);
void write_gray_png16(const std::filesystem::path& path, const Image<std::uint16_t>& pixels);
void write_rgb_png(const std::filesystem::path& path, const RgbImage& image);

/// Quantize a [0,1] map to 8 bits (round to nearest, clamped).
Image<std::uint8_t> quantize8(const ScalarMap& map);

}  // namespace camo
