#include "gta/image.hpp"

#include "gta/error.hpp"

#include <png.h>

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <fstream>

namespace gta {

RgbImage::RgbImage(int w, int h, Rgb fill) : width(w), height(h) {
  if (w < 0 || h < 0) throw ShapeError("image dimensions must be nonnegative");
  data.resize(static_cast<std::size_t>(w) * h * 3);
  for (std::size_t i = 0; i < data.size(); i += 3) {
    data[i] = fill[0];
    data[i + 1] = fill[1];
    data[i + 2] = fill[2];
  }
}

Rgb RgbImage::at(int x, int y) const {
  const std::size_t i = (static_cast<std::size_t>(y) * width + x) * 3;
  return {data[i], data[i + 1], data[i + 2]};
}

void RgbImage::set(int x, int y, Rgb c) {
  if (!in_bounds(x, y)) return;
  const std::size_t i = (static_cast<std::size_t>(y) * width + x) * 3;
  data[i] = c[0];
  data[i + 1] = c[1];
  data[i + 2] = c[2];
}

namespace draw {
namespace {

// Rows of a 3x5 glyph, 3 bits per row, MSB = left column.
constexpr std::array<std::array<std::uint8_t, 5>, 10> kDigits{{
    {7, 5, 5, 5, 7},  // 0
    {2, 6, 2, 2, 7},  // 1
    {7, 1, 7, 4, 7},  // 2
    {7, 1, 7, 1, 7},  // 3
    {5, 5, 7, 1, 1},  // 4
    {7, 4, 7, 1, 7},  // 5
    {7, 4, 7, 5, 7},  // 6
    {7, 1, 1, 1, 1},  // 7
    {7, 5, 7, 5, 7},  // 8
    {7, 5, 7, 1, 7},  // 9
}};

}  // namespace

void line(RgbImage& img, int x0, int y0, int x1, int y1, Rgb c) {
  const int dx = std::abs(x1 - x0), sx = x0 < x1 ? 1 : -1;
  const int dy = -std::abs(y1 - y0), sy = y0 < y1 ? 1 : -1;
  int err = dx + dy;
  while (true) {
    img.set(x0, y0, c);
    if (x0 == x1 && y0 == y1) break;
    const int e2 = 2 * err;
    if (e2 >= dy) { err += dy; x0 += sx; }
    if (e2 <= dx) { err += dx; y0 += sy; }
  }
}

void disc(RgbImage& img, int cx, int cy, int radius, Rgb c) {
  for (int y = -radius; y <= radius; ++y)
    for (int x = -radius; x <= radius; ++x)
      if (x * x + y * y <= radius * radius) img.set(cx + x, cy + y, c);
}

int text_width(std::string_view digits) {
  int n = 0;
  for (char ch : digits) n += (ch >= '0' && ch <= '9');
  return n == 0 ? 0 : 4 * n - 1;
}

void text(RgbImage& img, int x, int y, std::string_view digits, Rgb c) {
  for (char ch : digits) {
    if (ch < '0' || ch > '9') continue;
    const auto& glyph = kDigits[ch - '0'];
    for (int row = 0; row < 5; ++row)
      for (int col = 0; col < 3; ++col)
        if (glyph[row] & (4 >> col)) img.set(x + col, y + row, c);
    x += 4;
  }
}

int grid_line_position(int k, int extent) {
  return static_cast<int>(std::lround(k / 10.0 * (extent - 1)));
}

void normalized_grid(RgbImage& img) {
  if (img.empty()) return;
  for (int k = 0; k <= 10; ++k) {
    const int x = grid_line_position(k, img.width);
    const int y = grid_line_position(k, img.height);
    for (int row = 0; row < img.height; ++row) img.set(x, row, kGridColor);
    for (int col = 0; col < img.width; ++col) img.set(col, y, kGridColor);
  }
  // Labels sit just inside each line. The last label is right/bottom aligned and a
  // label that would touch the next line or the last label is dropped.
  const std::string last = std::to_string(1000);
  const int top_end = grid_line_position(10, img.width) - text_width(last) - 1;
  const int left_end = grid_line_position(10, img.height) - 6;
  for (int k = 0; k <= 10; ++k) {
    const std::string label = std::to_string(k * 100);
    const int w = text_width(label);
    const int x = grid_line_position(k, img.width);
    const int limit = std::min(top_end, grid_line_position(k + 1, img.width));
    if (k == 10) {
      text(img, top_end, 1, label, kLabelColor);
    } else if (k == 0 || x + w < limit) {
      text(img, x + 1, 1, label, kLabelColor);
    }
  }
  for (int k = 1; k <= 10; ++k) {
    const std::string label = std::to_string(k * 100);
    const int y = grid_line_position(k, img.height);
    const int limit = std::min(left_end, grid_line_position(k + 1, img.height));
    if (k == 10) {
      text(img, 1, left_end, label, kLabelColor);
    } else if (y + 5 < limit) {
      text(img, 1, y + 1, label, kLabelColor);
    }
  }
}

}  // namespace draw

namespace {

void png_append(png_structp png, png_bytep bytes, png_size_t n) {
  auto* out = static_cast<std::vector<std::uint8_t>*>(png_get_io_ptr(png));
  out->insert(out->end(), bytes, bytes + n);
}

void png_noop_flush(png_structp) {}

}  // namespace

std::vector<std::uint8_t> encode_png(const RgbImage& img) {
  if (img.empty()) throw ShapeError("cannot encode an empty image");
  std::vector<std::uint8_t> out;
  png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
  if (png == nullptr) throw IoError("png_create_write_struct failed");
  png_infop info = png_create_info_struct(png);
  if (info == nullptr || setjmp(png_jmpbuf(png))) {
    png_destroy_write_struct(&png, &info);
    throw IoError("PNG encoding failed");
  }
  png_set_write_fn(png, &out, png_append, png_noop_flush);
  png_set_IHDR(png, info, img.width, img.height, 8, PNG_COLOR_TYPE_RGB, PNG_INTERLACE_NONE,
               PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
  png_write_info(png, info);
  for (int y = 0; y < img.height; ++y) {
    auto* row = const_cast<png_bytep>(img.data.data() + static_cast<std::size_t>(y) * img.width * 3);
    png_write_row(png, row);
  }
  png_write_end(png, nullptr);
  png_destroy_write_struct(&png, &info);
  return out;
}

void write_png(const std::string& path, const RgbImage& img) {
  const auto bytes = encode_png(img);
  std::ofstream f(path, std::ios::binary);
  if (!f) throw IoError("cannot open " + path + " for writing");
  f.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
}

}  // namespace gta
