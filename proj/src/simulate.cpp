#include "linefit/simulate.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "linefit/extract.hpp"

namespace linefit {

namespace {

constexpr double kDeg2Rad = M_PI / 180.0;

Point direction_from_vertical(double tilt_deg) {
  return {std::sin(tilt_deg * kDeg2Rad), std::cos(tilt_deg * kDeg2Rad)};
}

Segment segment_at(Point center, double tilt_deg, double length) {
  const Point dir = direction_from_vertical(tilt_deg);
  return {{center.x - dir.x * length / 2.0, center.y - dir.y * length / 2.0},
          {center.x + dir.x * length / 2.0, center.y + dir.y * length / 2.0}};
}

/// Geometry draws shared by gen_annotation and gen_annotation_targets.
/// Draw order after the targets: mirror flag, metatarsal lean, first
/// metatarsal center/length, second metatarsal offset/center/length,
/// phalanx length, phalanx gap.
///
/// The deformity has one rotational sense: the phalanx deviates laterally
/// from the first metatarsal by alpha, the second metatarsal lies lateral
/// of the first by beta, and the first metatarsal itself leans a few
/// degrees off vertical. That consistent lean also keeps every axis away
/// from exactly-vertical, where the cell lattice aliases hardest. The
/// mirror flag swaps left and right feet.
Annotation build_annotation(SplitMix64& rng, uint64_t seed, double alpha_deg,
                            double beta_deg) {
  const bool mirror = rng.next_bool();
  const double tilt1 = rng.next_range(3.0, 8.0);
  const double m1_cx = rng.next_range(260.0, 300.0);
  const double m1_cy = rng.next_range(470.0, 530.0);
  const double m1_len = rng.next_range(270.0, 350.0);
  const double m2_dx = rng.next_range(80.0, 110.0);
  const double m2_cy = rng.next_range(480.0, 540.0);
  const double m2_len = rng.next_range(250.0, 330.0);
  const double ph_len = rng.next_range(190.0, 260.0);
  const double ph_gap = rng.next_range(6.0, 16.0);

  const double theta0 = tilt1 + alpha_deg;  // proximal phalanx
  const double theta2 = tilt1 + beta_deg;   // second metatarsal

  Annotation a;
  a.image_id = "sim-" + std::to_string(seed);
  a.image_w = 512;
  a.image_h = 1024;
  a.segments[1] = segment_at({m1_cx, m1_cy}, tilt1, m1_len);

  // Phalanx sits above the first metatarsal head, separated by a small gap
  // along its own axis.
  const Point m1_top = a.segments[1].a;
  const Point dir0 = direction_from_vertical(theta0);
  const Point ph_low{m1_top.x - dir0.x * ph_gap, m1_top.y - dir0.y * ph_gap};
  a.segments[0] = {{ph_low.x - dir0.x * ph_len, ph_low.y - dir0.y * ph_len},
                   ph_low};

  a.segments[2] = segment_at({m1_cx + m2_dx, m2_cy}, theta2, m2_len);

  if (mirror) {
    for (Segment& s : a.segments) {
      s.a.x = 512.0 - s.a.x;
      s.b.x = 512.0 - s.b.x;
    }
  }

  a.gt_alpha = alpha_deg;
  a.gt_beta = beta_deg;
  return a;
}

void validate_corruption(const CorruptionConfig& c) {
  if (!(c.drop_rate >= 0.0 && c.drop_rate <= 1.0))
    throw_error(Errc::ValueOutOfRange, "drop_rate must lie in [0, 1]");
  if (!(c.blob_value >= 0.0 && c.blob_value <= 1.0))
    throw_error(Errc::ValueOutOfRange, "blob_value must lie in [0, 1]");
  if (c.jitter_sigma < 0.0 || c.noise_sigma < 0.0 || c.blob_radius < 0.0 ||
      c.blob_count < 0)
    throw_error(Errc::ValueOutOfRange, "negative corruption parameter");
}

}  // namespace

Annotation gen_annotation(uint64_t seed) {
  SplitMix64 rng(seed);
  const double alpha = rng.next_range(0.0, 45.0);
  const double beta = rng.next_range(5.0, 20.0);
  return build_annotation(rng, seed, alpha, beta);
}

Annotation gen_annotation_targets(uint64_t seed, double alpha_deg,
                                  double beta_deg) {
  if (!(alpha_deg >= 0.0 && alpha_deg <= 89.0 && beta_deg >= 0.0 &&
        beta_deg <= 89.0))
    throw_error(Errc::ValueOutOfRange, "angle targets must lie in [0, 89]");
  SplitMix64 rng(seed);
  return build_annotation(rng, seed, alpha_deg, beta_deg);
}

Heatmap simulate_prediction(const Annotation& a, const RasterConfig& raster,
                            const CorruptionConfig& c) {
  validate_corruption(c);
  SplitMix64 rng(c.seed);

  std::array<Segment, 3> segments = a.segments;
  if (c.jitter_sigma > 0.0) {
    for (Segment& s : segments) {
      s.a.x += rng.next_gaussian(0.0, c.jitter_sigma);
      s.a.y += rng.next_gaussian(0.0, c.jitter_sigma);
      s.b.x += rng.next_gaussian(0.0, c.jitter_sigma);
      s.b.y += rng.next_gaussian(0.0, c.jitter_sigma);
    }
  }

  Heatmap h = rasterize(segments, raster);

  if (c.drop_rate > 0.0) {
    for (float& v : h.values)
      if (v == 1.0f && rng.next_double() < c.drop_rate) v = 0.0f;
  }

  if (c.noise_sigma > 0.0) {
    for (float& v : h.values) {
      const double noisy = v + rng.next_gaussian(0.0, c.noise_sigma);
      v = static_cast<float>(std::clamp(noisy, 0.0, 1.0));
    }
  }

  for (int b = 0; b < c.blob_count; ++b) {
    const auto ch = static_cast<uint32_t>(rng.next_below(h.channels));
    const double cx = rng.next_range(0.0, h.width);
    const double cy = rng.next_range(0.0, h.height);
    const auto value = static_cast<float>(c.blob_value);
    for (uint32_t row = 0; row < h.height; ++row)
      for (uint32_t col = 0; col < h.width; ++col)
        if (std::hypot(col + 0.5 - cx, row + 0.5 - cy) <= c.blob_radius)
          h.at(ch, row, col) = std::max(h.at(ch, row, col), value);
  }
  return h;
}

KeypointExperimentResult keypoint_experiment(
    const KeypointExperimentConfig& cfg) {
  if (cfg.n_trials < 1)
    throw_error(Errc::ValueOutOfRange, "n_trials must be >= 1");
  if (cfg.k_values.empty())
    throw_error(Errc::EmptySet, "no keypoint counts configured");
  for (const int k : cfg.k_values)
    if (k < 2) throw_error(Errc::ValueOutOfRange, "every k must be >= 2");
  if (cfg.jitter_sigma < 0.0 || !(cfg.segment_length > 0.0))
    throw_error(Errc::ValueOutOfRange, "bad keypoint experiment parameters");

  KeypointExperimentResult result;
  result.k_values = cfg.k_values;
  result.keypoint_errors.assign(cfg.k_values.size(),
                                std::vector<double>(cfg.n_trials, 0.0));
  result.dense_errors.assign(cfg.n_trials, 0.0);

  const int k_max = *std::max_element(cfg.k_values.begin(),
                                      cfg.k_values.end());

#pragma omp parallel for schedule(dynamic)
  for (int64_t trial = 0; trial < cfg.n_trials; ++trial) {
    SplitMix64 rng(cfg.seed ^ static_cast<uint64_t>(trial));
    const double theta = rng.next_range(-30.0, 30.0);
    const double cx = rng.next_range(180.0, 332.0);
    const double cy = rng.next_range(332.0, 692.0);
    const Segment seg = segment_at({cx, cy}, theta, cfg.segment_length);
    const Line truth = line_from_segment(seg);
    // Jitter moves points along the line normal (lateral deviation).
    const Point normal{truth.nx, truth.ny};

    const auto point_at = [&](double t, double g) {
      return Point{seg.a.x + t * (seg.b.x - seg.a.x) + g * normal.x,
                   seg.a.y + t * (seg.b.y - seg.a.y) + g * normal.y};
    };

    // Nested point sets: k keypoints are the two endpoints plus the first
    // k-2 entries of a shared pool of uniformly placed interior points, so
    // the comparison across k is paired. Draw order: endpoint jitters,
    // then per interior point its position and jitter.
    std::vector<Point> endpoints;
    endpoints.push_back(point_at(0.0, rng.next_gaussian(0.0, cfg.jitter_sigma)));
    endpoints.push_back(point_at(1.0, rng.next_gaussian(0.0, cfg.jitter_sigma)));
    std::vector<Point> pool;
    for (int j = 0; j < k_max - 2; ++j) {
      const double t = rng.next_double();
      const double g = rng.next_gaussian(0.0, cfg.jitter_sigma);
      pool.push_back(point_at(t, g));
    }
    for (size_t ki = 0; ki < cfg.k_values.size(); ++ki) {
      const int k = cfg.k_values[ki];
      std::vector<Point> sample(endpoints.begin(), endpoints.end());
      sample.insert(sample.end(), pool.begin(), pool.begin() + (k - 2));
      result.keypoint_errors[ki][trial] =
          angle_between(fit_keypoints(sample), truth).value;
    }

    const Heatmap dense = rasterize(std::array{seg}, cfg.raster);
    PointSet pts = extract_points_reference(dense, 0, 0.5);
    for (Point& p : pts.points) {
      const double g = rng.next_gaussian(0.0, cfg.jitter_sigma);
      p.x += g * normal.x;
      p.y += g * normal.y;
    }
    try {
      result.dense_errors[trial] =
          angle_between(fit_line(pts.points, cfg.dense_fit).line, truth).value;
    } catch (const Error&) {
      // Dense extraction too sparse on this grid; score worst case.
      result.dense_errors[trial] = 90.0;
    }
  }
  return result;
}

double sample_mean(std::span<const double> xs) { return mae(xs); }

double sample_median(std::span<const double> xs) {
  if (xs.empty()) throw_error(Errc::EmptySet, "median of an empty list");
  std::vector<double> tmp(xs.begin(), xs.end());
  const size_t mid = tmp.size() / 2;
  std::nth_element(tmp.begin(), tmp.begin() + mid, tmp.end());
  const double upper = tmp[mid];
  if (tmp.size() % 2 == 1) return upper;
  const double lower = *std::max_element(tmp.begin(), tmp.begin() + mid);
  return (lower + upper) / 2.0;
}

}  // namespace linefit
