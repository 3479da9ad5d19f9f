#pragma once

#include <span>
#include <vector>

#include "linefit/geometry.hpp"

namespace linefit {

/// M-estimator family for the scaled residual r = orthogonal_distance / sigma.
enum class RhoKind { kL2, kL1, kL12, kFair, kHuber, kWelsch };

/// 95% Gaussian-efficiency tuning constant; 1.0 for the constant-free kinds.
double default_tuning(RhoKind kind);

/// Loss value rho(r). Welsch is the only kind that saturates: its loss
/// approaches c^2/2 for large residuals, which is what caps the influence
/// of far outliers.
double rho(RhoKind kind, double r);

/// IRLS weight rho'(r)/r. In [0, 1] for every kind except L1, whose weight
/// 1/max(|r|, 1e-8) is unbounded near zero residual.
double rho_weight(RhoKind kind, double r);

struct FitConfig {
  RhoKind rho = RhoKind::kWelsch;
  int max_iter = 100;
  double tol = 1e-6;  // direction rotation per iteration, radians
  size_t min_points = 2;
};

struct FitResult {
  Line line;
  int iterations = 0;
  double final_objective = 0.0;        // sum of rho(r_i / sigma) at the fit
  std::vector<double> inlier_weights;  // final weights scaled into [0, 1]
};

/// One IRLS iterate, recorded after the scale update.
struct FitIterate {
  Line line;
  double sigma = 0.0;
};

/// Iteratively reweighted total-least-squares line fit.
///
/// Per iteration: weighted centroid and 2x2 scatter; line direction is the
/// principal scatter eigenvector (ties at exactly isotropic scatter break
/// toward vertical); orthogonal residuals; robust scale
/// 1.4826 * MAD, floored at 1e-6 px; weights rho_weight(r/sigma). Starts
/// from uniform weights, stops when the direction rotates less than
/// cfg.tol or after cfg.max_iter rounds (not an error; the last iterate is
/// returned with iterations == max_iter).
///
/// Welsch weights redescend, so the fit keeps whatever basin its start
/// lies in. Welsch fits therefore start from an LTS-concentrated line
/// (C-steps over the best half of the points, from both the plain TLS
/// line and a vertical median start) instead of the raw uniform-weight
/// fit. Initialization rounds are not counted in `iterations` and not
/// recorded in `trace`.
///
/// `point_weights`, when non-empty, multiplies the robust weights with a
/// fixed prior per point (e.g. heatmap probabilities); defaults to off.
FitResult fit_line(std::span<const Point> pts, const FitConfig& cfg = {},
                   std::span<const double> point_weights = {},
                   std::vector<FitIterate>* trace = nullptr);

/// Single-pass unweighted total-least-squares line through exactly the
/// given points; the keypoint baseline.
Line fit_keypoints(std::span<const Point> pts);

}  // namespace linefit
