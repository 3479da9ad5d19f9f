#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "linefit/eval.hpp"
#include "linefit/raster.hpp"
#include "linefit/rng.hpp"
#include "linefit/robust.hpp"

namespace linefit {

/// Failure modes of a heatmap predictor, applied in a fixed order after
/// rasterizing: endpoint jitter (before rasterizing), foreground dropout,
/// clamped additive noise, high-probability outlier discs. Every stage
/// consumes randomness only when its parameter is active, so streams are
/// reproducible from the documented draw protocol.
struct CorruptionConfig {
  double drop_rate = 0.0;     // fraction of foreground cells zeroed
  double jitter_sigma = 0.0;  // px gaussian endpoint perturbation
  int blob_count = 0;
  double blob_radius = 4.0;  // cells
  double blob_value = 0.9;
  double noise_sigma = 0.0;  // per-cell additive noise std, clamped to [0,1]
  uint64_t seed = 0;
};

/// Seeded synthetic ground truth: three near-vertical bone axes inside a
/// 512 x 1024 frame whose HVA/IMA equal targets drawn from
/// alpha ~ U[0, 45] and beta ~ U[5, 20] degrees (all severity classes
/// reachable). Deterministic in the seed.
Annotation gen_annotation(uint64_t seed);

/// Same construction with fixed angle targets; the remaining geometry
/// draws follow gen_annotation's protocol.
Annotation gen_annotation_targets(uint64_t seed, double alpha_deg,
                                  double beta_deg);

/// Corrupted "network prediction" for an annotation. With an all-zero
/// CorruptionConfig this equals rasterize(a.segments, raster) exactly.
Heatmap simulate_prediction(const Annotation& a, const RasterConfig& raster,
                            const CorruptionConfig& c);

struct KeypointExperimentConfig {
  int n_trials = 1000;
  std::vector<int> k_values = {2, 3, 4};
  double jitter_sigma = 2.0;     // lateral px per sampled point
  uint64_t seed = 0;
  double segment_length = 60.0;  // px
  RasterConfig raster;           // dense-pipeline grid
  FitConfig dense_fit;           // defaults to WELSCH
};

/// Angle errors in degrees; one inner vector per k, one entry per trial.
struct KeypointExperimentResult {
  std::vector<int> k_values;
  std::vector<std::vector<double>> keypoint_errors;
  std::vector<double> dense_errors;
};

/// The keypoint-count baseline: per trial, the two segment endpoints plus
/// k-2 uniformly placed interior points get independent lateral jitter and
/// a plain TLS fit; point sets are nested across k so the comparison is
/// paired. (With symmetric evenly spaced points a third midpoint is
/// angle-inert: the fitted slope stays (g_end - g_start) / L, so k = 3
/// would tie k = 2 exactly.) The dense route rasterizes the same segment,
/// extracts the cells and fits robustly, with the same per-point lateral
/// jitter applied to the extracted points (the k -> all-points limit under
/// an identical noise model). Trials are OpenMP-parallel; trial t draws
/// from seed ^ t.
KeypointExperimentResult keypoint_experiment(
    const KeypointExperimentConfig& cfg);

double sample_mean(std::span<const double> xs);
double sample_median(std::span<const double> xs);

}  // namespace linefit
