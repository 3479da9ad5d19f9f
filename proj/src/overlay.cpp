#include "linefit/overlay.hpp"

#include <array>
#include <cstdio>
#include <optional>
#include <vector>

#include "linefit/angles.hpp"
#include "linefit/extract.hpp"

namespace linefit {

namespace {

const char* kChannelColors[] = {"red", "green", "blue", "orange", "purple"};
constexpr size_t kColorCount = sizeof(kChannelColors) / sizeof(char*);

std::string num(double v) {
  char buf[48];
  std::snprintf(buf, sizeof(buf), "%.2f", v);
  return buf;
}

/// Clips an infinite line to the [0,w] x [0,h] frame; nullopt if disjoint.
std::optional<Segment> clip_line(const Line& l, double w, double h) {
  const Point base{l.nx * l.d, l.ny * l.d};
  const Point dir{l.ny, -l.nx};
  double t_min = -1e18, t_max = 1e18;
  const double starts[2] = {base.x, base.y};
  const double deltas[2] = {dir.x, dir.y};
  const double limits[2] = {w, h};
  for (int axis = 0; axis < 2; ++axis) {
    if (deltas[axis] == 0.0) {
      if (starts[axis] < 0.0 || starts[axis] > limits[axis]) return std::nullopt;
      continue;
    }
    double t0 = (0.0 - starts[axis]) / deltas[axis];
    double t1 = (limits[axis] - starts[axis]) / deltas[axis];
    if (t0 > t1) std::swap(t0, t1);
    t_min = std::max(t_min, t0);
    t_max = std::min(t_max, t1);
  }
  if (t_min >= t_max) return std::nullopt;
  return Segment{{base.x + t_min * dir.x, base.y + t_min * dir.y},
                 {base.x + t_max * dir.x, base.y + t_max * dir.y}};
}

}  // namespace

std::string render_overlay(const Heatmap& h, const OverlayOptions& opts) {
  const double frame_w = static_cast<double>(h.width) * h.scale;
  const double frame_h = static_cast<double>(h.height) * h.scale;

  std::string svg;
  svg += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + num(frame_w) +
         "\" height=\"" + num(frame_h) + "\" viewBox=\"0 0 " + num(frame_w) +
         " " + num(frame_h) + "\">\n";
  svg += "<rect x=\"0\" y=\"0\" width=\"" + num(frame_w) + "\" height=\"" +
         num(frame_h) + "\" fill=\"black\"/>\n";

  std::vector<std::optional<Line>> lines(h.channels);
  for (uint32_t ch = 0; ch < h.channels; ++ch) {
    const char* color = kChannelColors[ch % kColorCount];
    const PointSet pts = extract_points(h, ch, opts.extract_threshold);
    for (const Point& p : pts.points)
      svg += "<circle cx=\"" + num(p.x) + "\" cy=\"" + num(p.y) +
             "\" r=\"1.5\" fill=\"" + std::string(color) +
             "\" fill-opacity=\"0.45\"/>\n";
    try {
      lines[ch] = fit_line(pts.points, opts.fit).line;
    } catch (const Error& e) {
      svg += "<!-- channel " + std::to_string(ch) +
             ": fit failed (" + std::string(e.what()) + ") -->\n";
      continue;
    }
    if (const auto seg = clip_line(*lines[ch], frame_w, frame_h)) {
      svg += "<line x1=\"" + num(seg->a.x) + "\" y1=\"" + num(seg->a.y) +
             "\" x2=\"" + num(seg->b.x) + "\" y2=\"" + num(seg->b.y) +
             "\" stroke=\"" + std::string(color) + "\" stroke-width=\"2.5\"/>\n";
    } else {
      svg += "<!-- channel " + std::to_string(ch) +
             ": fitted line outside the frame -->\n";
    }
  }

  if (h.channels >= 3 && lines[0] && lines[1] && lines[2]) {
    const AngleReport report = compute_report(*lines[0], *lines[1], *lines[2]);
    svg += "<text x=\"10\" y=\"24\" fill=\"white\" font-size=\"16\">alpha = " +
           num(report.alpha.value) + " deg (" +
           severity_name(report.hva_class) + "), beta = " +
           num(report.beta.value) + " deg (" + severity_name(report.ima_class) +
           ")</text>\n";
  }
  svg += "</svg>\n";
  return svg;
}

}  // namespace linefit
