#include "linefit/raster.hpp"

#include <cstdint>

namespace linefit {

namespace {

void check_segments(std::span<const Segment> segments) {
  for (const Segment& s : segments) {
    if (s.a.x == s.b.x && s.a.y == s.b.y)
      throw_error(Errc::DegenerateSegment, "cannot rasterize a zero-length segment");
  }
}

float cell_label(const Segment& s, const RasterConfig& cfg, uint32_t row,
                 uint32_t col) {
  const Point center{(col + 0.5) * cfg.scale, (row + 0.5) * cfg.scale};
  const double half_width = cfg.line_width * cfg.scale / 2.0;
  return distance_to_segment(s, center) <= half_width ? 1.0f : 0.0f;
}

}  // namespace

Heatmap rasterize(std::span<const Segment> segments, const RasterConfig& cfg) {
  check_segments(segments);
  Heatmap h(cfg.grid_width, cfg.grid_height,
            static_cast<uint32_t>(segments.size()), cfg.scale);
  const int64_t rows_total =
      static_cast<int64_t>(segments.size()) * cfg.grid_height;
#pragma omp parallel for schedule(static)
  for (int64_t i = 0; i < rows_total; ++i) {
    const auto ch = static_cast<uint32_t>(i / cfg.grid_height);
    const auto row = static_cast<uint32_t>(i % cfg.grid_height);
    float* out = h.values.data() + h.index(ch, row, 0);
    for (uint32_t col = 0; col < cfg.grid_width; ++col)
      out[col] = cell_label(segments[ch], cfg, row, col);
  }
  return h;
}

Heatmap rasterize_reference(std::span<const Segment> segments,
                            const RasterConfig& cfg) {
  check_segments(segments);
  Heatmap h(cfg.grid_width, cfg.grid_height,
            static_cast<uint32_t>(segments.size()), cfg.scale);
  for (uint32_t ch = 0; ch < h.channels; ++ch)
    for (uint32_t row = 0; row < cfg.grid_height; ++row)
      for (uint32_t col = 0; col < cfg.grid_width; ++col)
        h.at(ch, row, col) = cell_label(segments[ch], cfg, row, col);
  return h;
}

std::vector<Heatmap> sweep_widths(std::span<const Segment> segments,
                                  const RasterConfig& base,
                                  std::span<const int> widths) {
  if (widths.empty())
    throw_error(Errc::EmptySet, "sweep_widths needs at least one width");
  std::vector<Heatmap> maps;
  maps.reserve(widths.size());
  for (const int w : widths) {
    RasterConfig cfg = base;
    cfg.line_width = w;
    maps.push_back(rasterize(segments, cfg));
  }
  return maps;
}

}  // namespace linefit
