#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace gta {

using Rgb = std::array<std::uint8_t, 3>;

/// Row-major 8-bit RGB raster.
struct RgbImage {
  int width = 0;
  int height = 0;
  std::vector<std::uint8_t> data;

  RgbImage() = default;
  RgbImage(int w, int h, Rgb fill = {0, 0, 0});

  bool empty() const { return width <= 0 || height <= 0; }
  bool in_bounds(int x, int y) const { return x >= 0 && y >= 0 && x < width && y < height; }
  Rgb at(int x, int y) const;
  void set(int x, int y, Rgb c);  // silently clips

  bool operator==(const RgbImage&) const = default;
};

namespace draw {

inline constexpr Rgb kGridColor{0, 170, 255};
inline constexpr Rgb kLabelColor{255, 64, 255};

void line(RgbImage& img, int x0, int y0, int x1, int y1, Rgb c);
void disc(RgbImage& img, int cx, int cy, int radius, Rgb c);
/// 3x5 bitmap digits, one blank column between glyphs. Non-digit characters are skipped.
void text(RgbImage& img, int x, int y, std::string_view digits, Rgb c);
int text_width(std::string_view digits);

/// Pixel column/row of normalized grid coordinate `k * 100`, k = 0..10.
int grid_line_position(int k, int extent);

/// Grid lines every 100 units of the normalized [0,1000] frame plus border labels.
/// Pixels are overwritten with fixed colors, so repeated application is a no-op.
void normalized_grid(RgbImage& img);

}  // namespace draw

/// Encodes as an 8-bit RGB PNG. Output is deterministic for identical input.
std::vector<std::uint8_t> encode_png(const RgbImage& img);
void write_png(const std::string& path, const RgbImage& img);

}  // namespace gta
