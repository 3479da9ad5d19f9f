#pragma once

#include <cstdint>
#include <vector>

#include "linefit/geometry.hpp"
#include "linefit/heatmap.hpp"

namespace linefit {

/// Above-threshold cell centers of one channel, mapped back to
/// original-image pixels, in row-major cell order.
struct PointSet {
  std::vector<Point> points;
  uint32_t source_channel = 0;
};

/// Picks every cell with value strictly greater than `threshold` and emits
/// its center ((c+0.5)*scale, (r+0.5)*scale). Cells exactly at the
/// threshold are background. OpenMP-parallel over rows.
PointSet extract_points(const Heatmap& h, uint32_t channel,
                        double threshold = 0.5);

/// Serial reference for extract_points.
PointSet extract_points_reference(const Heatmap& h, uint32_t channel,
                                  double threshold = 0.5);

}  // namespace linefit
