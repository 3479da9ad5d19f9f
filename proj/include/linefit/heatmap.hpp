#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <vector>

#include "linefit/error.hpp"

namespace linefit {

/// C-channel probability grid. Values are stored planar (channel-major),
/// row-major within a channel. `scale` relates cell coordinates to
/// original-image pixels: cell (r, c) covers the pixel block starting at
/// (c*scale, r*scale) and has its center at ((c+0.5)*scale, (r+0.5)*scale).
struct Heatmap {
  uint32_t width = 0;   // cells per row
  uint32_t height = 0;  // rows
  uint32_t channels = 0;
  uint32_t scale = 1;   // original px per cell, 4 in the standard pipeline
  std::vector<float> values;

  Heatmap() = default;
  Heatmap(uint32_t w, uint32_t h, uint32_t c, uint32_t s)
      : width(w), height(h), channels(c), scale(s),
        values(static_cast<size_t>(w) * h * c, 0.0f) {}

  size_t plane_size() const { return static_cast<size_t>(width) * height; }

  size_t index(uint32_t channel, uint32_t row, uint32_t col) const {
    return channel * plane_size() + static_cast<size_t>(row) * width + col;
  }

  float at(uint32_t channel, uint32_t row, uint32_t col) const {
    return values[index(channel, row, col)];
  }
  float& at(uint32_t channel, uint32_t row, uint32_t col) {
    return values[index(channel, row, col)];
  }
};

// HVAH container, bit-exact:
//   magic "HVAH" | version u8 = 1 | width u32 LE | height u32 LE |
//   channels u32 LE | scale u32 LE | payload channels*height*width f32 LE,
//   planar, row-major.
// Header is 21 bytes; total file size is 21 + 4 * width * height * channels.
Heatmap read_hvah(std::istream& in);
void write_hvah(const Heatmap& h, std::ostream& out);

Heatmap read_hvah_file(const std::filesystem::path& path);
void write_hvah_file(const Heatmap& h, const std::filesystem::path& path);

/// One channel as binary PGM (P5, maxval 255); v maps to round(v*255).
void export_pgm(const Heatmap& h, uint32_t channel, std::ostream& out);

}  // namespace linefit
