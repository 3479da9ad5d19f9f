#pragma once

#include "linefit/error.hpp"

namespace linefit {

/// Image coordinates: origin top-left, x rightward, y downward, in pixels.
struct Point {
  double x = 0.0;
  double y = 0.0;
};

/// Annotated bone axis: two distinct endpoints in original-image pixels.
struct Segment {
  Point a;
  Point b;
};

/// Undirected 2-D line in unit-normal form: nx*x + ny*y = d.
/// Canonical sign: ny > 0, or ny == 0 and nx > 0.
struct Line {
  double nx = 0.0;
  double ny = 1.0;
  double d = 0.0;
};

/// Angle between two undirected lines, folded into [0, 90] degrees.
struct AngleDeg {
  double value = 0.0;
};

Line canonicalize(Line l);

/// Line through both endpoints of `s`. Throws DegenerateSegment if a == b.
Line line_from_segment(const Segment& s);

/// arccos(|n1 . n2|) in degrees; symmetric, in [0, 90].
AngleDeg angle_between(const Line& l1, const Line& l2);

double distance_to_line(const Line& l, const Point& p);
double distance_to_segment(const Segment& s, const Point& p);

/// Coordinate map from an arbitrary source image onto the fixed
/// 512 x 1024 network input frame: proportional scale to width 512,
/// then bottom crop or bottom black padding to height 1024.
struct PreprocessTransform {
  static constexpr int kTargetWidth = 512;
  static constexpr int kTargetHeight = 1024;

  double scale = 1.0;  // 512 / src_w
  int scaled_height = 0;
  int crop_rows = 0;  // rows removed from the bottom
  int pad_rows = 0;   // black rows appended at the bottom

  Point apply(const Point& p) const { return {p.x * scale, p.y * scale}; }
  Point invert(const Point& p) const { return {p.x / scale, p.y / scale}; }
};

PreprocessTransform preprocess_transform(int src_w, int src_h);

}  // namespace linefit
