#include "linefit/extract.hpp"

#include <string>

namespace linefit {

namespace {

void check_args(const Heatmap& h, uint32_t channel, double threshold) {
  if (channel >= h.channels)
    throw_error(Errc::ChannelOutOfRange,
                "channel " + std::to_string(channel) + " of " +
                    std::to_string(h.channels));
  if (!(threshold > 0.0 && threshold < 1.0))
    throw_error(Errc::ValueOutOfRange, "threshold must lie in (0, 1)");
}

}  // namespace

PointSet extract_points(const Heatmap& h, uint32_t channel, double threshold) {
  check_args(h, channel, threshold);
  // Per-row buckets keep the output row-major regardless of schedule.
  std::vector<std::vector<Point>> rows(h.height);
#pragma omp parallel for schedule(static)
  for (int64_t row = 0; row < static_cast<int64_t>(h.height); ++row) {
    const float* v = h.values.data() + h.index(channel, row, 0);
    auto& bucket = rows[row];
    for (uint32_t col = 0; col < h.width; ++col) {
      if (v[col] > threshold)
        bucket.push_back(
            {(col + 0.5) * h.scale, (static_cast<uint32_t>(row) + 0.5) * h.scale});
    }
  }
  PointSet out;
  out.source_channel = channel;
  for (const auto& bucket : rows)
    out.points.insert(out.points.end(), bucket.begin(), bucket.end());
  return out;
}

PointSet extract_points_reference(const Heatmap& h, uint32_t channel,
                                  double threshold) {
  check_args(h, channel, threshold);
  PointSet out;
  out.source_channel = channel;
  for (uint32_t row = 0; row < h.height; ++row)
    for (uint32_t col = 0; col < h.width; ++col)
      if (h.at(channel, row, col) > threshold)
        out.points.push_back({(col + 0.5) * h.scale, (row + 0.5) * h.scale});
  return out;
}

}  // namespace linefit
