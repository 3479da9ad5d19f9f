#pragma once

#include <array>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "linefit/angles.hpp"
#include "linefit/geometry.hpp"
#include "linefit/heatmap.hpp"
#include "linefit/robust.hpp"

namespace linefit {

/// Ground truth for one image: the three bone axes in original pixels,
/// channel order as in AngleReport. Stored angles, when present, must
/// match the recomputed ones within 0.01 degrees.
struct Annotation {
  std::string image_id;
  int image_w = 0;
  int image_h = 0;
  std::array<Segment, 3> segments;
  std::optional<double> gt_alpha;
  std::optional<double> gt_beta;
};

/// Throws BadAnnotation on a degenerate segment or a stored-angle mismatch.
void validate_annotation(const Annotation& a);

/// Stored angles if present, otherwise recomputed from the segments.
AngleReport annotation_report(const Annotation& a);

Annotation annotation_from_json(const std::string& text);
std::string annotation_to_json(const Annotation& a);
Annotation read_annotation_file(const std::string& path);
void write_annotation_file(const Annotation& a, const std::string& path);

struct EvalRow {
  std::string image_id;
  double pred_alpha = 0.0, pred_beta = 0.0;  // NaN when the fit failed
  double gt_alpha = 0.0, gt_beta = 0.0;
  double err_alpha = 0.0, err_beta = 0.0;  // absolute degrees
  bool failed = false;
};

struct EvalSummary {
  size_t n = 0;
  size_t failures = 0;
  double mae_alpha = 0.0, mae_beta = 0.0;
  std::vector<double> thresholds;  // degrees
  std::vector<double> acc_alpha;   // acc^t per threshold
  std::vector<double> acc_beta;
};

/// Fraction of errors strictly below t. Throws EmptySet on no errors.
double acc_t(std::span<const double> errors, double t);

/// Arithmetic mean (compensated summation). Throws EmptySet.
double mae(std::span<const double> errors);

struct EvalCase {
  Annotation annotation;
  Heatmap prediction;
};

struct EvalConfig {
  FitConfig fit;
  double extract_threshold = 0.5;
  std::vector<double> acc_thresholds = {3.0, 5.0};
};

struct EvalReport {
  std::vector<EvalRow> rows;
  EvalSummary summary;
};

/// Per image: extract each channel, fit, compute angles, score absolute
/// errors against the annotation. A channel with too few points marks the
/// row failed with both errors at 90 degrees (the metric's worst case).
/// OpenMP-parallel over images. Throws EmptyDataset.
EvalReport evaluate(std::span<const EvalCase> dataset, const EvalConfig& cfg);

/// Serial reference for evaluate.
EvalReport evaluate_reference(std::span<const EvalCase> dataset,
                              const EvalConfig& cfg);

std::string rows_to_csv(std::span<const EvalRow> rows);
std::string summary_to_json(const EvalSummary& s);

}  // namespace linefit
