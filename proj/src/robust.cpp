#include "linefit/robust.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace linefit {

namespace {

constexpr double kL1Guard = 1e-8;  // keeps the L1 weight finite at zero
constexpr double kSigmaFloor = 1e-6;
constexpr double kMadConsistency = 1.4826;

struct Moments {
  double total = 0.0;
  double mean_x = 0.0, mean_y = 0.0;
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
};

Moments weighted_moments(std::span<const Point> pts,
                         std::span<const double> w) {
  Moments m;
  double sx = 0.0, sy = 0.0;
  for (size_t i = 0; i < pts.size(); ++i) {
    m.total += w[i];
    sx += w[i] * pts[i].x;
    sy += w[i] * pts[i].y;
  }
  if (m.total <= 0.0) return m;
  m.mean_x = sx / m.total;
  m.mean_y = sy / m.total;
  for (size_t i = 0; i < pts.size(); ++i) {
    const double dx = pts[i].x - m.mean_x;
    const double dy = pts[i].y - m.mean_y;
    m.sxx += w[i] * dx * dx;
    m.sxy += w[i] * dx * dy;
    m.syy += w[i] * dy * dy;
  }
  return m;
}

/// Unit eigenvector of the largest scatter eigenvalue. Rank-0 scatter
/// returns false; exactly isotropic scatter breaks the tie toward the
/// vertical direction.
bool principal_axis(const Moments& m, double* dir_x, double* dir_y) {
  const double trace = m.sxx + m.syy;
  if (trace <= 0.0) return false;
  const double half_diff = (m.sxx - m.syy) / 2.0;
  const double disc = std::hypot(half_diff, m.sxy);
  if (disc == 0.0) {
    *dir_x = 0.0;
    *dir_y = 1.0;
    return true;
  }
  const double lambda = trace / 2.0 + disc;
  const double v1x = m.sxy, v1y = lambda - m.sxx;
  const double v2x = lambda - m.syy, v2y = m.sxy;
  double vx, vy;
  if (v1x * v1x + v1y * v1y >= v2x * v2x + v2y * v2y) {
    vx = v1x;
    vy = v1y;
  } else {
    vx = v2x;
    vy = v2y;
  }
  const double norm = std::hypot(vx, vy);
  *dir_x = vx / norm;
  *dir_y = vy / norm;
  return true;
}

Line line_through(double dir_x, double dir_y, double cx, double cy) {
  Line l;
  l.nx = -dir_y;
  l.ny = dir_x;
  l.d = l.nx * cx + l.ny * cy;
  return canonicalize(l);
}

double median_inplace(std::vector<double>& v) {
  const size_t n = v.size();
  const size_t mid = n / 2;
  std::nth_element(v.begin(), v.begin() + mid, v.end());
  const double upper = v[mid];
  if (n % 2 == 1) return upper;
  const double lower = *std::max_element(v.begin(), v.begin() + mid);
  return (lower + upper) / 2.0;
}

double robust_sigma(std::span<const double> residuals) {
  std::vector<double> tmp(residuals.begin(), residuals.end());
  const double med = median_inplace(tmp);
  for (double& r : tmp) r = std::abs(r - med);
  const double mad = median_inplace(tmp);
  return std::max(kMadConsistency * mad, kSigmaFloor);
}

void validate_config(const FitConfig& cfg) {
  if (cfg.max_iter < 1)
    throw_error(Errc::ValueOutOfRange, "max_iter must be >= 1");
  if (!(cfg.tol > 0.0)) throw_error(Errc::ValueOutOfRange, "tol must be > 0");
}

bool all_coincident(std::span<const Point> pts) {
  for (const Point& p : pts)
    if (p.x != pts[0].x || p.y != pts[0].y) return false;
  return true;
}

}  // namespace

double default_tuning(RhoKind kind) {
  switch (kind) {
    case RhoKind::kFair:
      return 1.3998;
    case RhoKind::kHuber:
      return 1.345;
    case RhoKind::kWelsch:
      return 2.9846;
    default:
      return 1.0;
  }
}

double rho(RhoKind kind, double r) {
  const double c = default_tuning(kind);
  const double a = std::abs(r);
  switch (kind) {
    case RhoKind::kL2:
      return r * r / 2.0;
    case RhoKind::kL1:
      return a;
    case RhoKind::kL12:
      return 2.0 * (std::sqrt(1.0 + r * r / 2.0) - 1.0);
    case RhoKind::kFair:
      return c * c * (a / c - std::log1p(a / c));
    case RhoKind::kHuber:
      return a <= c ? r * r / 2.0 : c * a - c * c / 2.0;
    case RhoKind::kWelsch:
      return c * c / 2.0 * (1.0 - std::exp(-(r / c) * (r / c)));
  }
  return 0.0;
}

double rho_weight(RhoKind kind, double r) {
  const double c = default_tuning(kind);
  const double a = std::abs(r);
  switch (kind) {
    case RhoKind::kL2:
      return 1.0;
    case RhoKind::kL1:
      return 1.0 / std::max(a, kL1Guard);
    case RhoKind::kL12:
      return 1.0 / std::sqrt(1.0 + r * r / 2.0);
    case RhoKind::kFair:
      return 1.0 / (1.0 + a / c);
    case RhoKind::kHuber:
      return a <= c ? 1.0 : c / a;
    case RhoKind::kWelsch:
      return std::exp(-(r / c) * (r / c));
  }
  return 0.0;
}

namespace {

struct IrlsState {
  std::vector<double> weights;
  std::vector<double> residuals;
  Line line;
  double sigma = kSigmaFloor;
  int iterations = 0;  // rounds spent by the last phase
  bool converged = false;
  bool started = false;  // at least one usable iterate exists
};

/// Runs IRLS rounds for one estimator kind, continuing from the state's
/// current weights. Returns false only when no iterate could be formed.
bool irls_phase(std::span<const Point> pts, std::span<const double> priors,
                RhoKind kind, int max_iter, double tol, IrlsState& state,
                std::vector<FitIterate>* trace) {
  const size_t n = pts.size();
  double prev_dx = 0.0, prev_dy = 0.0;
  state.iterations = 0;
  state.converged = false;
  for (int iter = 1; iter <= max_iter; ++iter) {
    const Moments m = weighted_moments(pts, state.weights);
    double dx, dy;
    if (m.total <= 0.0 || !principal_axis(m, &dx, &dy)) {
      // Weights collapsed; the previous iterate is the usable answer.
      return state.started;
    }
    state.line = line_through(dx, dy, m.mean_x, m.mean_y);
    for (size_t i = 0; i < n; ++i)
      state.residuals[i] =
          state.line.nx * pts[i].x + state.line.ny * pts[i].y - state.line.d;
    state.sigma = robust_sigma(state.residuals);
    state.iterations = iter;
    state.started = true;
    if (trace) trace->push_back({state.line, state.sigma});

    if (iter > 1) {
      const double dot = std::min(std::abs(dx * prev_dx + dy * prev_dy), 1.0);
      if (std::acos(dot) < tol) {
        state.converged = true;
        break;
      }
    }
    prev_dx = dx;
    prev_dy = dy;

    for (size_t i = 0; i < n; ++i) {
      state.weights[i] = rho_weight(kind, state.residuals[i] / state.sigma);
      if (!priors.empty()) state.weights[i] *= priors[i];
    }
  }
  return true;
}

// Welsch weights vanish on large residuals, so the fit inherits whatever
// basin the starting line sits in. Before the Welsch phase the iterate is
// moved to the majority structure with LTS concentration steps: refit on
// the half of the points with the smallest absolute residuals. Each step
// lowers the trimmed objective (the FAST-LTS C-step), and half coverage
// tolerates any outlier mass below 50%.
constexpr int kConcentrationStepCap = 20;
constexpr double kConcentrationTol = 1e-4;  // radians

size_t lts_half(size_t n) { return n / 2 + 1; }

double trim_threshold(std::span<const double> residuals, size_t h) {
  std::vector<double> abs_r(residuals.size());
  for (size_t i = 0; i < residuals.size(); ++i) abs_r[i] = std::abs(residuals[i]);
  std::nth_element(abs_r.begin(), abs_r.begin() + (h - 1), abs_r.end());
  return abs_r[h - 1];
}

void line_residuals(std::span<const Point> pts, const Line& l,
                    std::vector<double>& out) {
  out.resize(pts.size());
  for (size_t i = 0; i < pts.size(); ++i)
    out[i] = l.nx * pts[i].x + l.ny * pts[i].y - l.d;
}

double trimmed_objective(std::span<const Point> pts, const Line& l) {
  std::vector<double> r;
  line_residuals(pts, l, r);
  for (double& v : r) v = v * v;
  const size_t h = lts_half(pts.size());
  std::nth_element(r.begin(), r.begin() + (h - 1), r.end());
  double sum = 0.0;
  for (size_t i = 0; i < h; ++i) sum += r[i];
  return sum;
}

/// Runs C-steps from `start` until the direction settles; returns the
/// concentrated line (or `start` when a refit degenerates).
Line lts_concentrate(std::span<const Point> pts,
                     std::span<const double> priors, Line start) {
  const size_t n = pts.size();
  const size_t h = lts_half(n);
  Line line = start;
  std::vector<double> residuals;
  std::vector<double> w(n);
  double prev_dx = 0.0, prev_dy = 0.0;
  for (int step = 0; step < kConcentrationStepCap; ++step) {
    line_residuals(pts, line, residuals);
    const double thresh = trim_threshold(residuals, h);
    for (size_t i = 0; i < n; ++i) {
      w[i] = std::abs(residuals[i]) <= thresh ? 1.0 : 0.0;
      if (!priors.empty()) w[i] *= priors[i];
    }
    const Moments m = weighted_moments(pts, w);
    double dx, dy;
    if (m.total <= 0.0 || !principal_axis(m, &dx, &dy)) break;
    line = line_through(dx, dy, m.mean_x, m.mean_y);
    if (step > 0) {
      const double dot = std::min(std::abs(dx * prev_dx + dy * prev_dy), 1.0);
      if (std::acos(dot) < kConcentrationTol) break;
    }
    prev_dx = dx;
    prev_dy = dy;
  }
  return line;
}

/// TLS line through the half of the points nearest the coordinatewise
/// median, an MCD-style start that ignores any minority cluster outright.
bool median_half_start(std::span<const Point> pts, Line* out) {
  const size_t n = pts.size();
  std::vector<double> xs(n), ys(n);
  for (size_t i = 0; i < n; ++i) {
    xs[i] = pts[i].x;
    ys[i] = pts[i].y;
  }
  const double mx = median_inplace(xs);
  const double my = median_inplace(ys);
  std::vector<double> dist2(n);
  for (size_t i = 0; i < n; ++i) {
    const double dx = pts[i].x - mx;
    const double dy = pts[i].y - my;
    dist2[i] = dx * dx + dy * dy;
  }
  const size_t h = lts_half(n);
  std::vector<double> copy = dist2;
  std::nth_element(copy.begin(), copy.begin() + (h - 1), copy.end());
  const double thresh = copy[h - 1];
  std::vector<double> w(n);
  for (size_t i = 0; i < n; ++i) w[i] = dist2[i] <= thresh ? 1.0 : 0.0;
  const Moments m = weighted_moments(pts, w);
  double dx, dy;
  if (m.total <= 0.0 || !principal_axis(m, &dx, &dy)) return false;
  *out = line_through(dx, dy, m.mean_x, m.mean_y);
  return true;
}

/// Deterministic high-breakdown start for the Welsch phase: C-steps from
/// the plain TLS line, a vertical line through the median x (bone axes
/// are near-vertical), and the median-half line, keeping the lowest
/// trimmed objective.
bool welsch_init(std::span<const Point> pts, std::span<const double> priors,
                 IrlsState& state) {
  const size_t n = pts.size();
  const Moments uniform = weighted_moments(pts, state.weights);
  double dx, dy;
  if (uniform.total <= 0.0 || !principal_axis(uniform, &dx, &dy)) return false;

  std::vector<Line> starts;
  starts.push_back(line_through(dx, dy, uniform.mean_x, uniform.mean_y));
  std::vector<double> xs(n);
  for (size_t i = 0; i < n; ++i) xs[i] = pts[i].x;
  starts.push_back(canonicalize({1.0, 0.0, median_inplace(xs)}));
  Line median_half;
  if (median_half_start(pts, &median_half)) starts.push_back(median_half);

  Line best;
  double best_obj = 0.0;
  bool have = false;
  for (const Line& start : starts) {
    const Line candidate = lts_concentrate(pts, priors, start);
    const double obj = trimmed_objective(pts, candidate);
    if (!have || obj < best_obj) {
      best = candidate;
      best_obj = obj;
      have = true;
    }
  }
  state.line = best;
  line_residuals(pts, state.line, state.residuals);
  state.sigma = robust_sigma(state.residuals);
  state.started = true;
  return true;
}

}  // namespace

FitResult fit_line(std::span<const Point> pts, const FitConfig& cfg,
                   std::span<const double> point_weights,
                   std::vector<FitIterate>* trace) {
  validate_config(cfg);
  const size_t n = pts.size();
  if (n < cfg.min_points || n < 2)
    throw_error(Errc::TooFewPoints, "need at least " +
                                        std::to_string(std::max<size_t>(
                                            cfg.min_points, 2)) +
                                        " points, got " + std::to_string(n));
  if (!point_weights.empty() && point_weights.size() != n)
    throw_error(Errc::ValueOutOfRange,
                "point_weights size does not match point count");
  if (all_coincident(pts))
    throw_error(Errc::DegeneratePoints, "all points coincide");

  IrlsState state;
  state.weights.assign(n, 1.0);
  if (!point_weights.empty())
    state.weights.assign(point_weights.begin(), point_weights.end());
  state.residuals.resize(n);

  if (cfg.rho == RhoKind::kWelsch) {
    if (!welsch_init(pts, point_weights, state))
      throw_error(Errc::DegeneratePoints, "scatter has rank 0");
    for (size_t i = 0; i < n; ++i) {
      state.weights[i] = rho_weight(RhoKind::kWelsch,
                                    state.residuals[i] / state.sigma);
      if (!point_weights.empty()) state.weights[i] *= point_weights[i];
    }
  }
  if (!irls_phase(pts, point_weights, cfg.rho, cfg.max_iter, cfg.tol, state,
                  trace))
    throw_error(Errc::DegeneratePoints, "scatter has rank 0");

  FitResult result;
  result.line = state.line;
  result.iterations = state.iterations;
  result.inlier_weights.resize(n);
  double wmax = 0.0;
  for (size_t i = 0; i < n; ++i) {
    result.final_objective += rho(cfg.rho, state.residuals[i] / state.sigma);
    result.inlier_weights[i] =
        rho_weight(cfg.rho, state.residuals[i] / state.sigma);
    wmax = std::max(wmax, result.inlier_weights[i]);
  }
  // L1 weights exceed 1 near zero residual; rescale so the reported
  // weights always lie in [0, 1].
  if (wmax > 1.0)
    for (double& wi : result.inlier_weights) wi /= wmax;
  return result;
}

Line fit_keypoints(std::span<const Point> pts) {
  if (pts.size() < 2)
    throw_error(Errc::TooFewPoints,
                "need at least 2 points, got " + std::to_string(pts.size()));
  const std::vector<double> uniform(pts.size(), 1.0);
  const Moments m = weighted_moments(pts, uniform);
  double dx, dy;
  if (!principal_axis(m, &dx, &dy))
    throw_error(Errc::DegeneratePoints, "all points coincide");
  return line_through(dx, dy, m.mean_x, m.mean_y);
}

}  // namespace linefit
