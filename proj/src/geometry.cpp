#include "linefit/geometry.hpp"

#include <algorithm>
#include <cmath>

namespace linefit {

Line canonicalize(Line l) {
  if (l.ny < 0.0 || (l.ny == 0.0 && l.nx < 0.0)) {
    l.nx = -l.nx;
    l.ny = -l.ny;
    l.d = -l.d;
  }
  // Kill negative zeros so canonical lines compare bitwise equal.
  if (l.nx == 0.0) l.nx = 0.0;
  if (l.ny == 0.0) l.ny = 0.0;
  if (l.d == 0.0) l.d = 0.0;
  return l;
}

Line line_from_segment(const Segment& s) {
  const double dx = s.b.x - s.a.x;
  const double dy = s.b.y - s.a.y;
  const double len = std::hypot(dx, dy);
  if (len == 0.0)
    throw_error(Errc::DegenerateSegment, "segment endpoints coincide");
  Line l;
  l.nx = -dy / len;
  l.ny = dx / len;
  // Offset from the midpoint so the result is exactly invariant under
  // endpoint swap.
  const double mx = (s.a.x + s.b.x) / 2.0;
  const double my = (s.a.y + s.b.y) / 2.0;
  l.d = l.nx * mx + l.ny * my;
  return canonicalize(l);
}

AngleDeg angle_between(const Line& l1, const Line& l2) {
  const double dot = std::abs(l1.nx * l2.nx + l1.ny * l2.ny);
  const double clamped = std::min(dot, 1.0);
  return AngleDeg{std::acos(clamped) * 180.0 / M_PI};
}

double distance_to_line(const Line& l, const Point& p) {
  return std::abs(l.nx * p.x + l.ny * p.y - l.d);
}

double distance_to_segment(const Segment& s, const Point& p) {
  const double dx = s.b.x - s.a.x;
  const double dy = s.b.y - s.a.y;
  const double len2 = dx * dx + dy * dy;
  double t = 0.0;
  if (len2 > 0.0) {
    t = ((p.x - s.a.x) * dx + (p.y - s.a.y) * dy) / len2;
    t = std::clamp(t, 0.0, 1.0);
  }
  return std::hypot(p.x - (s.a.x + t * dx), p.y - (s.a.y + t * dy));
}

PreprocessTransform preprocess_transform(int src_w, int src_h) {
  PreprocessTransform t;
  t.scale = static_cast<double>(PreprocessTransform::kTargetWidth) / src_w;
  // Half-away-from-zero rounding, stable across platforms.
  t.scaled_height = static_cast<int>(std::llround(src_h * t.scale));
  t.crop_rows = std::max(0, t.scaled_height - PreprocessTransform::kTargetHeight);
  t.pad_rows = std::max(0, PreprocessTransform::kTargetHeight - t.scaled_height);
  return t;
}

}  // namespace linefit
