#pragma once

#include <span>
#include <vector>

#include "linefit/geometry.hpp"
#include "linefit/heatmap.hpp"

namespace linefit {

/// Label geometry: stroke width `line_width` is measured in cells at
/// heatmap resolution, so the capsule half-width in original pixels is
/// line_width * scale / 2.
struct RasterConfig {
  int line_width = 4;
  uint32_t grid_width = 128;
  uint32_t grid_height = 256;
  uint32_t scale = 4;
};

/// Hard 0/1 labels: cell (r, c) of channel i is 1.0 iff the distance from
/// the cell center ((c+0.5)*scale, (r+0.5)*scale) to segment i, taken as a
/// closed segment, is <= line_width*scale/2 (inclusive). One channel per
/// segment. OpenMP-parallel over cells.
Heatmap rasterize(std::span<const Segment> segments, const RasterConfig& cfg);

/// Serial reference for rasterize; identical output, kept for tests and
/// the benchmark.
Heatmap rasterize_reference(std::span<const Segment> segments,
                            const RasterConfig& cfg);

/// One rasterization per width on the shared grid.
std::vector<Heatmap> sweep_widths(std::span<const Segment> segments,
                                  const RasterConfig& base,
                                  std::span<const int> widths);

}  // namespace linefit
