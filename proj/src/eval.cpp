#include "linefit/eval.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "linefit/extract.hpp"

#include <json.hpp>

namespace linefit {

namespace {

constexpr double kGtAngleTolerance = 0.01;  // degrees
constexpr double kWorstCaseError = 90.0;

double kahan_sum(std::span<const double> xs) {
  double sum = 0.0, carry = 0.0;
  for (const double x : xs) {
    const double y = x - carry;
    const double t = sum + y;
    carry = (t - sum) - y;
    sum = t;
  }
  return sum;
}

std::string format_fixed(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.6f", v);
  return buf;
}

std::string format_threshold(double t) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%g", t);
  return buf;
}

// Rejects everything that is not a per-image fit failure up front; the
// parallel loop below must not leak exceptions.
void preflight(std::span<const EvalCase> dataset, const EvalConfig& cfg) {
  if (dataset.empty()) throw_error(Errc::EmptyDataset, "no images to evaluate");
  if (!(cfg.extract_threshold > 0.0 && cfg.extract_threshold < 1.0))
    throw_error(Errc::ValueOutOfRange, "extract threshold must lie in (0, 1)");
  if (cfg.fit.max_iter < 1)
    throw_error(Errc::ValueOutOfRange, "max_iter must be >= 1");
  if (!(cfg.fit.tol > 0.0))
    throw_error(Errc::ValueOutOfRange, "tol must be > 0");
  if (cfg.acc_thresholds.empty())
    throw_error(Errc::EmptySet, "no accuracy thresholds configured");
  for (const EvalCase& c : dataset) {
    if (c.prediction.channels < 3)
      throw_error(Errc::ChannelOutOfRange,
                  c.annotation.image_id + ": prediction needs 3 channels");
    validate_annotation(c.annotation);
  }
}

EvalRow evaluate_one(const EvalCase& c, const EvalConfig& cfg) {
  EvalRow row;
  row.image_id = c.annotation.image_id;
  const AngleReport gt = annotation_report(c.annotation);
  row.gt_alpha = gt.alpha.value;
  row.gt_beta = gt.beta.value;
  try {
    std::array<Line, 3> lines;
    for (uint32_t ch = 0; ch < 3; ++ch) {
      const PointSet pts =
          extract_points(c.prediction, ch, cfg.extract_threshold);
      lines[ch] = fit_line(pts.points, cfg.fit).line;
    }
    const AngleReport pred = compute_report(lines[0], lines[1], lines[2]);
    row.pred_alpha = pred.alpha.value;
    row.pred_beta = pred.beta.value;
    row.err_alpha = std::abs(row.pred_alpha - row.gt_alpha);
    row.err_beta = std::abs(row.pred_beta - row.gt_beta);
  } catch (const Error&) {
    row.failed = true;
    row.pred_alpha = std::nan("");
    row.pred_beta = std::nan("");
    row.err_alpha = kWorstCaseError;
    row.err_beta = kWorstCaseError;
  }
  return row;
}

EvalSummary summarize(std::span<const EvalRow> rows,
                      std::span<const double> thresholds) {
  std::vector<double> errs_alpha, errs_beta;
  errs_alpha.reserve(rows.size());
  errs_beta.reserve(rows.size());
  EvalSummary s;
  for (const EvalRow& r : rows) {
    errs_alpha.push_back(r.err_alpha);
    errs_beta.push_back(r.err_beta);
    if (r.failed) ++s.failures;
  }
  s.n = rows.size();
  s.mae_alpha = mae(errs_alpha);
  s.mae_beta = mae(errs_beta);
  s.thresholds.assign(thresholds.begin(), thresholds.end());
  for (const double t : thresholds) {
    s.acc_alpha.push_back(acc_t(errs_alpha, t));
    s.acc_beta.push_back(acc_t(errs_beta, t));
  }
  return s;
}

}  // namespace

void validate_annotation(const Annotation& a) {
  for (const Segment& s : a.segments) {
    if (s.a.x == s.b.x && s.a.y == s.b.y)
      throw_error(Errc::BadAnnotation,
                  a.image_id + ": degenerate segment in annotation");
  }
  const AngleReport computed = compute_report(
      line_from_segment(a.segments[0]), line_from_segment(a.segments[1]),
      line_from_segment(a.segments[2]));
  if (a.gt_alpha &&
      std::abs(*a.gt_alpha - computed.alpha.value) > kGtAngleTolerance)
    throw_error(Errc::BadAnnotation,
                a.image_id + ": stored alpha disagrees with segments");
  if (a.gt_beta &&
      std::abs(*a.gt_beta - computed.beta.value) > kGtAngleTolerance)
    throw_error(Errc::BadAnnotation,
                a.image_id + ": stored beta disagrees with segments");
}

AngleReport annotation_report(const Annotation& a) {
  AngleReport r = compute_report(line_from_segment(a.segments[0]),
                                 line_from_segment(a.segments[1]),
                                 line_from_segment(a.segments[2]));
  if (a.gt_alpha) {
    r.alpha.value = *a.gt_alpha;
    r.hva_class = classify_hva(r.alpha);
  }
  if (a.gt_beta) {
    r.beta.value = *a.gt_beta;
    r.ima_class = classify_ima(r.beta);
  }
  return r;
}

Annotation annotation_from_json(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw_error(Errc::BadAnnotation, std::string("annotation JSON: ") + e.what());
  }
  try {
    Annotation a;
    a.image_id = j.at("image").get<std::string>();
    a.image_w = j.at("width").get<int>();
    a.image_h = j.at("height").get<int>();
    const auto& segs = j.at("segments");
    if (!segs.is_array() || segs.size() != 3)
      throw_error(Errc::BadAnnotation,
                  a.image_id + ": annotation needs exactly 3 segments");
    for (size_t i = 0; i < 3; ++i) {
      const auto& s = segs.at(i);
      a.segments[i].a = {s.at(0).at(0).get<double>(), s.at(0).at(1).get<double>()};
      a.segments[i].b = {s.at(1).at(0).get<double>(), s.at(1).at(1).get<double>()};
    }
    if (j.contains("alpha_deg")) a.gt_alpha = j.at("alpha_deg").get<double>();
    if (j.contains("beta_deg")) a.gt_beta = j.at("beta_deg").get<double>();
    validate_annotation(a);
    return a;
  } catch (const nlohmann::json::exception& e) {
    throw_error(Errc::BadAnnotation, std::string("annotation JSON: ") + e.what());
  }
}

std::string annotation_to_json(const Annotation& a) {
  nlohmann::json j;
  j["image"] = a.image_id;
  j["width"] = a.image_w;
  j["height"] = a.image_h;
  nlohmann::json segs = nlohmann::json::array();
  for (const Segment& s : a.segments)
    segs.push_back({{s.a.x, s.a.y}, {s.b.x, s.b.y}});
  j["segments"] = segs;
  if (a.gt_alpha) j["alpha_deg"] = *a.gt_alpha;
  if (a.gt_beta) j["beta_deg"] = *a.gt_beta;
  return j.dump(2) + "\n";
}

Annotation read_annotation_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw_error(Errc::IoFailure, "cannot open " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return annotation_from_json(buf.str());
}

void write_annotation_file(const Annotation& a, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw_error(Errc::IoFailure, "cannot create " + path);
  out << annotation_to_json(a);
  if (!out) throw_error(Errc::IoFailure, "write failed: " + path);
}

double acc_t(std::span<const double> errors, double t) {
  if (errors.empty()) throw_error(Errc::EmptySet, "acc_t of an empty error list");
  if (!(t > 0.0)) throw_error(Errc::ValueOutOfRange, "threshold must be > 0");
  size_t below = 0;
  for (const double e : errors)
    if (e < t) ++below;
  return static_cast<double>(below) / static_cast<double>(errors.size());
}

double mae(std::span<const double> errors) {
  if (errors.empty()) throw_error(Errc::EmptySet, "mae of an empty error list");
  return kahan_sum(errors) / static_cast<double>(errors.size());
}

EvalReport evaluate(std::span<const EvalCase> dataset, const EvalConfig& cfg) {
  preflight(dataset, cfg);
  EvalReport report;
  report.rows.resize(dataset.size());
#pragma omp parallel for schedule(dynamic)
  for (int64_t i = 0; i < static_cast<int64_t>(dataset.size()); ++i)
    report.rows[i] = evaluate_one(dataset[i], cfg);
  report.summary = summarize(report.rows, cfg.acc_thresholds);
  return report;
}

EvalReport evaluate_reference(std::span<const EvalCase> dataset,
                              const EvalConfig& cfg) {
  preflight(dataset, cfg);
  EvalReport report;
  report.rows.reserve(dataset.size());
  for (const EvalCase& c : dataset) report.rows.push_back(evaluate_one(c, cfg));
  report.summary = summarize(report.rows, cfg.acc_thresholds);
  return report;
}

std::string rows_to_csv(std::span<const EvalRow> rows) {
  std::string csv =
      "image_id,pred_alpha_deg,pred_beta_deg,gt_alpha_deg,gt_beta_deg,"
      "err_alpha_deg,err_beta_deg\n";
  for (const EvalRow& r : rows) {
    csv += r.image_id;
    for (const double v : {r.pred_alpha, r.pred_beta, r.gt_alpha, r.gt_beta,
                           r.err_alpha, r.err_beta}) {
      csv += ',';
      csv += format_fixed(v);
    }
    csv += '\n';
  }
  return csv;
}

std::string summary_to_json(const EvalSummary& s) {
  nlohmann::json acc_alpha, acc_beta;
  for (size_t i = 0; i < s.thresholds.size(); ++i) {
    acc_alpha[format_threshold(s.thresholds[i])] = s.acc_alpha[i];
    acc_beta[format_threshold(s.thresholds[i])] = s.acc_beta[i];
  }
  const nlohmann::json j = {{"n", s.n},
                            {"failures", s.failures},
                            {"mae_alpha_deg", s.mae_alpha},
                            {"mae_beta_deg", s.mae_beta},
                            {"acc", {{"alpha", acc_alpha}, {"beta", acc_beta}}}};
  return j.dump(2) + "\n";
}

}  // namespace linefit
