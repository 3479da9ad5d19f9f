#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "linefit/eval.hpp"
#include "linefit/extract.hpp"
#include "linefit/heatmap.hpp"
#include "linefit/overlay.hpp"
#include "linefit/parallel.hpp"
#include "linefit/raster.hpp"
#include "linefit/simulate.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace linefit;

namespace {

constexpr int kExitInput = 2;
constexpr int kExitCompute = 3;

struct FitFlags {
  std::string rho = "welsch";
  double threshold = 0.5;
  int max_iter = 100;
  double tol = 1e-6;
};

struct RasterFlags {
  int line_width = 4;
  uint32_t scale = 4;
};

struct CorruptionFlags {
  double jitter_sigma = 0.0;
  double drop_rate = 0.0;
  double noise_sigma = 0.0;
  int blob_count = 0;
  double blob_radius = 4.0;
  double blob_value = 0.9;
};

RhoKind parse_rho(const std::string& name) {
  if (name == "l2") return RhoKind::kL2;
  if (name == "l1") return RhoKind::kL1;
  if (name == "l12") return RhoKind::kL12;
  if (name == "fair") return RhoKind::kFair;
  if (name == "huber") return RhoKind::kHuber;
  if (name == "welsch") return RhoKind::kWelsch;
  throw_error(Errc::ValueOutOfRange, "unknown rho kind: " + name);
}

FitConfig to_fit_config(const FitFlags& f) {
  FitConfig cfg;
  cfg.rho = parse_rho(f.rho);
  cfg.max_iter = f.max_iter;
  cfg.tol = f.tol;
  return cfg;
}

/// Raster grid covering the fixed 512 x 1024 frame at the given scale.
RasterConfig to_raster_config(const RasterFlags& r) {
  RasterConfig cfg;
  cfg.line_width = r.line_width;
  cfg.scale = r.scale;
  cfg.grid_width = (512 + r.scale - 1) / r.scale;
  cfg.grid_height = (1024 + r.scale - 1) / r.scale;
  return cfg;
}

CorruptionConfig to_corruption(const CorruptionFlags& c, uint64_t seed) {
  CorruptionConfig cfg;
  cfg.jitter_sigma = c.jitter_sigma;
  cfg.drop_rate = c.drop_rate;
  cfg.noise_sigma = c.noise_sigma;
  cfg.blob_count = c.blob_count;
  cfg.blob_radius = c.blob_radius;
  cfg.blob_value = c.blob_value;
  cfg.seed = seed;
  return cfg;
}

void add_fit_flags(CLI::App* cmd, FitFlags& f) {
  cmd->add_option("--rho", f.rho, "Distance metric")
      ->check(CLI::IsMember({"l2", "l1", "l12", "fair", "huber", "welsch"}))
      ->capture_default_str();
  cmd->add_option("--threshold", f.threshold,
                  "Extraction probability threshold")
      ->capture_default_str();
  cmd->add_option("--max-iter", f.max_iter, "IRLS iteration cap")
      ->capture_default_str();
  cmd->add_option("--tol", f.tol, "IRLS direction tolerance (radians)")
      ->capture_default_str();
}

void add_raster_flags(CLI::App* cmd, RasterFlags& r) {
  cmd->add_option("--line-width", r.line_width,
                  "Label stroke width in heatmap cells")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  cmd->add_option("--scale", r.scale, "Original pixels per heatmap cell")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
}

void add_corruption_flags(CLI::App* cmd, CorruptionFlags& c) {
  cmd->add_option("--jitter-sigma", c.jitter_sigma,
                  "Gaussian endpoint jitter in px before rasterizing")
      ->capture_default_str();
  cmd->add_option("--drop-rate", c.drop_rate,
                  "Fraction of foreground cells zeroed")
      ->capture_default_str();
  cmd->add_option("--noise-sigma", c.noise_sigma,
                  "Per-cell additive noise std")
      ->capture_default_str();
  cmd->add_option("--blob-count", c.blob_count, "Outlier discs per image")
      ->capture_default_str();
  cmd->add_option("--blob-radius", c.blob_radius, "Disc radius in cells")
      ->capture_default_str();
  cmd->add_option("--blob-value", c.blob_value, "Disc probability value")
      ->capture_default_str();
}

void write_text_file(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw_error(Errc::IoFailure, "cannot create " + path.string());
  out << text;
  if (!out) throw_error(Errc::IoFailure, "write failed: " + path.string());
}

std::string format_deg(double v) {
  char buf[48];
  std::snprintf(buf, sizeof(buf), "%.3f", v);
  return buf;
}

// ---------------------------------------------------------------- fit ----

int cmd_fit(const std::string& heatmap_path, const std::string& annotation_path,
            const FitFlags& flags, bool pretty) {
  const Heatmap h = read_hvah_file(heatmap_path);
  if (h.channels < 3)
    throw_error(Errc::ChannelOutOfRange,
                "expected a 3-channel heatmap, got " +
                    std::to_string(h.channels) + " channels");
  const FitConfig fit_cfg = to_fit_config(flags);

  json channels = json::array();
  std::array<Line, 3> lines;
  for (uint32_t ch = 0; ch < 3; ++ch) {
    const PointSet pts = extract_points(h, ch, flags.threshold);
    FitResult fit;
    try {
      fit = fit_line(pts.points, fit_cfg);
    } catch (const Error& e) {
      if (e.code() == Errc::TooFewPoints)
        throw_error(Errc::TooFewPoints,
                    "too few points, channel " + std::to_string(ch));
      throw_error(e.code(), std::string(e.what()) + ", channel " +
                                std::to_string(ch));
    }
    lines[ch] = fit.line;
    channels.push_back({{"channel", ch},
                        {"nx", fit.line.nx},
                        {"ny", fit.line.ny},
                        {"d", fit.line.d},
                        {"points", pts.points.size()},
                        {"iterations", fit.iterations}});
  }
  const AngleReport report = compute_report(lines[0], lines[1], lines[2]);

  json out = {{"file", heatmap_path},
              {"channels", channels},
              {"alpha_deg", report.alpha.value},
              {"beta_deg", report.beta.value},
              {"hva_class", severity_name(report.hva_class)},
              {"ima_class", severity_name(report.ima_class)}};
  if (!annotation_path.empty()) {
    const Annotation ann = read_annotation_file(annotation_path);
    const AngleReport gt = annotation_report(ann);
    out["gt_alpha_deg"] = gt.alpha.value;
    out["gt_beta_deg"] = gt.beta.value;
    out["err_alpha_deg"] = std::abs(report.alpha.value - gt.alpha.value);
    out["err_beta_deg"] = std::abs(report.beta.value - gt.beta.value);
  }

  if (pretty) {
    std::printf("alpha = %s deg (%s)\n", format_deg(report.alpha.value).c_str(),
                severity_name(report.hva_class));
    std::printf("beta  = %s deg (%s)\n", format_deg(report.beta.value).c_str(),
                severity_name(report.ima_class));
    for (const auto& ch : channels)
      std::printf("channel %d: n=(%.6f, %.6f) d=%.3f points=%zu iters=%d\n",
                  ch["channel"].get<int>(), ch["nx"].get<double>(),
                  ch["ny"].get<double>(), ch["d"].get<double>(),
                  ch["points"].get<size_t>(), ch["iterations"].get<int>());
    if (out.contains("err_alpha_deg"))
      std::printf("errors: alpha %s deg, beta %s deg\n",
                  format_deg(out["err_alpha_deg"].get<double>()).c_str(),
                  format_deg(out["err_beta_deg"].get<double>()).c_str());
  } else {
    std::cout << out.dump(2) << "\n";
  }
  return 0;
}

// --------------------------------------------------------------- eval ----

struct DirListing {
  std::vector<std::string> stems;  // paired stems, sorted
  std::vector<std::string> annotation_only;
  std::vector<std::string> heatmap_only;
  fs::path dir;
};

DirListing scan_dataset_dir(const std::string& dir) {
  if (!fs::is_directory(dir))
    throw_error(Errc::IoFailure, dir + " is not a directory");
  std::map<std::string, int> seen;  // bit 1 = json, bit 2 = hvah
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (!entry.is_regular_file()) continue;
    const fs::path p = entry.path();
    if (p.extension() == ".json") seen[p.stem().string()] |= 1;
    if (p.extension() == ".hvah") seen[p.stem().string()] |= 2;
  }
  DirListing listing;
  listing.dir = dir;
  for (const auto& [stem, bits] : seen) {
    if (bits == 3) listing.stems.push_back(stem);
    if (bits == 1) listing.annotation_only.push_back(stem);
    if (bits == 2) listing.heatmap_only.push_back(stem);
  }
  return listing;
}

void print_summary_grid(const std::vector<std::pair<int, EvalSummary>>& grid) {
  json out = json::array();
  for (const auto& [width, summary] : grid) {
    json row = json::parse(summary_to_json(summary));
    row["line_width"] = width;
    out.push_back(row);
  }
  std::cout << out.dump(2) << "\n";
}

std::string grid_to_csv(const std::vector<std::pair<int, EvalSummary>>& grid) {
  std::string csv = "line_width";
  const auto& thresholds = grid.front().second.thresholds;
  auto col = [](const char* prefix, double t) {
    char buf[48];
    std::snprintf(buf, sizeof(buf), ",%s%g", prefix, t);
    return std::string(buf);
  };
  for (const double t : thresholds) csv += col("acc_alpha_", t);
  for (const double t : thresholds) csv += col("acc_beta_", t);
  csv += ",mae_alpha_deg,mae_beta_deg,failures\n";
  for (const auto& [width, s] : grid) {
    csv += std::to_string(width);
    char buf[48];
    for (const double a : s.acc_alpha) {
      std::snprintf(buf, sizeof(buf), ",%.6f", a);
      csv += buf;
    }
    for (const double b : s.acc_beta) {
      std::snprintf(buf, sizeof(buf), ",%.6f", b);
      csv += buf;
    }
    std::snprintf(buf, sizeof(buf), ",%.6f,%.6f,%zu\n", s.mae_alpha,
                  s.mae_beta, s.failures);
    csv += buf;
  }
  return csv;
}

int cmd_eval(const std::string& dir, const std::string& out_prefix,
             const FitFlags& fit_flags, const RasterFlags& raster_flags,
             const CorruptionFlags& corruption,
             const std::vector<double>& acc_thresholds,
             const std::vector<int>& sweep_widths, uint64_t seed) {
  const DirListing listing = scan_dataset_dir(dir);
  EvalConfig cfg;
  cfg.fit = to_fit_config(fit_flags);
  cfg.extract_threshold = fit_flags.threshold;
  if (!acc_thresholds.empty()) cfg.acc_thresholds = acc_thresholds;

  if (!sweep_widths.empty()) {
    // Sweep mode regenerates predictions per width from the annotations.
    std::vector<std::string> stems = listing.stems;
    stems.insert(stems.end(), listing.annotation_only.begin(),
                 listing.annotation_only.end());
    std::sort(stems.begin(), stems.end());
    if (stems.empty())
      throw_error(Errc::EmptyDataset, "no annotations in " + dir);
    std::vector<Annotation> annotations;
    for (const auto& stem : stems)
      annotations.push_back(
          read_annotation_file((listing.dir / (stem + ".json")).string()));

    std::vector<std::pair<int, EvalSummary>> grid;
    for (const int width : sweep_widths) {
      RasterFlags rf = raster_flags;
      rf.line_width = width;
      const RasterConfig raster = to_raster_config(rf);
      std::vector<EvalCase> dataset(annotations.size());
      for (size_t i = 0; i < annotations.size(); ++i) {
        const uint64_t image_seed =
            seed ^ static_cast<uint64_t>(i) ^ kPredictionStreamSalt;
        dataset[i].annotation = annotations[i];
        dataset[i].prediction = simulate_prediction(
            annotations[i], raster, to_corruption(corruption, image_seed));
      }
      grid.emplace_back(width, evaluate(dataset, cfg).summary);
    }
    json sweep_json = json::array();
    for (const auto& [width, summary] : grid) {
      json row = json::parse(summary_to_json(summary));
      row["line_width"] = width;
      sweep_json.push_back(row);
    }
    write_text_file(out_prefix + "_sweep.json", sweep_json.dump(2) + "\n");
    write_text_file(out_prefix + "_sweep.csv", grid_to_csv(grid));
    print_summary_grid(grid);
    return 0;
  }

  if (!listing.annotation_only.empty() || !listing.heatmap_only.empty()) {
    std::cerr << "unpaired files in " << dir << ":\n";
    for (const auto& stem : listing.annotation_only)
      std::cerr << "  " << stem << ".json (no matching .hvah)\n";
    for (const auto& stem : listing.heatmap_only)
      std::cerr << "  " << stem << ".hvah (no matching .json)\n";
    return kExitInput;
  }
  if (listing.stems.empty())
    throw_error(Errc::EmptyDataset, "no annotation/heatmap pairs in " + dir);

  std::vector<EvalCase> dataset;
  for (const auto& stem : listing.stems) {
    EvalCase c;
    c.annotation =
        read_annotation_file((listing.dir / (stem + ".json")).string());
    c.prediction = read_hvah_file(listing.dir / (stem + ".hvah"));
    dataset.push_back(std::move(c));
  }
  const EvalReport report = evaluate(dataset, cfg);
  write_text_file(out_prefix + "_rows.csv", rows_to_csv(report.rows));
  write_text_file(out_prefix + "_summary.json",
                  summary_to_json(report.summary));
  std::cout << summary_to_json(report.summary);
  return 0;
}

// ---------------------------------------------------------- rasterize ----

int cmd_rasterize(const std::string& annotation_path, std::string out_path,
                  const RasterFlags& raster_flags) {
  const Annotation ann = read_annotation_file(annotation_path);
  const Heatmap label =
      rasterize(ann.segments, to_raster_config(raster_flags));
  if (out_path.empty())
    out_path = fs::path(annotation_path).replace_extension(".hvah").string();
  write_hvah_file(label, out_path);
  std::cout << json{{"out", out_path},
                    {"foreground_cells",
                     std::count(label.values.begin(), label.values.end(), 1.0f)}}
                   .dump(2)
            << "\n";
  return 0;
}

// ----------------------------------------------------------- simulate ----

int cmd_simulate(int n, uint64_t seed, const std::string& out_dir,
                 const RasterFlags& raster_flags,
                 const CorruptionFlags& corruption) {
  if (n < 1) throw_error(Errc::ValueOutOfRange, "--n must be >= 1");
  fs::create_directories(out_dir);
  const RasterConfig raster = to_raster_config(raster_flags);
  for (int i = 0; i < n; ++i) {
    const uint64_t ann_seed = seed ^ static_cast<uint64_t>(i);
    Annotation ann = gen_annotation(ann_seed);
    char stem[32];
    std::snprintf(stem, sizeof(stem), "img_%05d", i);
    ann.image_id = stem;
    const Heatmap pred = simulate_prediction(
        ann, raster,
        to_corruption(corruption, ann_seed ^ kPredictionStreamSalt));
    write_annotation_file(
        ann, (fs::path(out_dir) / (std::string(stem) + ".json")).string());
    write_hvah_file(pred, fs::path(out_dir) / (std::string(stem) + ".hvah"));
  }
  std::cout << json{{"images", n}, {"out", out_dir}}.dump(2) << "\n";
  return 0;
}

// ----------------------------------------------------------- keypoints ----

int cmd_keypoints(int trials, const std::vector<int>& ks, double jitter_sigma,
                  double segment_length, uint64_t seed,
                  const RasterFlags& raster_flags, bool pretty) {
  KeypointExperimentConfig cfg;
  cfg.n_trials = trials;
  if (!ks.empty()) cfg.k_values = ks;
  cfg.jitter_sigma = jitter_sigma;
  cfg.segment_length = segment_length;
  cfg.seed = seed;
  cfg.raster = to_raster_config(raster_flags);
  const KeypointExperimentResult r = keypoint_experiment(cfg);

  json per_k = json::array();
  for (size_t i = 0; i < r.k_values.size(); ++i)
    per_k.push_back({{"k", r.k_values[i]},
                     {"mean_error_deg", sample_mean(r.keypoint_errors[i])},
                     {"median_error_deg", sample_median(r.keypoint_errors[i])}});
  const json out = {{"trials", trials},
                    {"jitter_sigma", jitter_sigma},
                    {"segment_length", segment_length},
                    {"per_k", per_k},
                    {"dense",
                     {{"mean_error_deg", sample_mean(r.dense_errors)},
                      {"median_error_deg", sample_median(r.dense_errors)}}}};
  if (pretty) {
    std::printf("%-8s %-14s %s\n", "k", "mean err", "median err");
    for (const auto& row : per_k)
      std::printf("%-8d %-14.4f %.4f\n", row["k"].get<int>(),
                  row["mean_error_deg"].get<double>(),
                  row["median_error_deg"].get<double>());
    std::printf("%-8s %-14.4f %.4f\n", "dense",
                out["dense"]["mean_error_deg"].get<double>(),
                out["dense"]["median_error_deg"].get<double>());
  } else {
    std::cout << out.dump(2) << "\n";
  }
  return 0;
}

// ------------------------------------------------------------- overlay ----

int cmd_overlay(const std::string& heatmap_path, std::string out_path,
                const FitFlags& fit_flags) {
  const Heatmap h = read_hvah_file(heatmap_path);
  OverlayOptions opts;
  opts.fit = to_fit_config(fit_flags);
  opts.extract_threshold = fit_flags.threshold;
  if (out_path.empty())
    out_path = fs::path(heatmap_path).replace_extension(".svg").string();
  write_text_file(out_path, render_overlay(h, opts));
  std::cout << json{{"out", out_path}}.dump(2) << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  apply_thread_cap();
  CLI::App app{"Bone-axis line fitting and hallux valgus angle measurement "
               "from probability heatmaps"};
  app.require_subcommand(1);
  int rc = 0;

  // fit
  auto* fit = app.add_subcommand("fit", "Fit lines and report angles");
  std::string fit_heatmap, fit_annotation;
  FitFlags fit_flags;
  bool fit_pretty = false;
  fit->add_option("heatmap", fit_heatmap, "HVAH heatmap file")->required();
  fit->add_option("--annotation", fit_annotation,
                  "Annotation JSON for error reporting");
  add_fit_flags(fit, fit_flags);
  fit->add_flag("--pretty", fit_pretty, "Human-readable output");
  fit->callback(
      [&] { rc = cmd_fit(fit_heatmap, fit_annotation, fit_flags, fit_pretty); });

  // eval
  auto* eval = app.add_subcommand("eval", "Evaluate a dataset directory");
  std::string eval_dir, eval_out = "eval";
  FitFlags eval_fit;
  RasterFlags eval_raster;
  CorruptionFlags eval_corruption;
  std::vector<double> eval_thresholds;
  std::vector<int> eval_sweep;
  uint64_t eval_seed = 0;
  eval->add_option("dir", eval_dir, "Directory of *.json/*.hvah pairs")
      ->required();
  eval->add_option("--out", eval_out, "Output path prefix")
      ->capture_default_str();
  eval->add_option("--acc-thresholds", eval_thresholds,
                   "acc^t thresholds in degrees")
      ->delimiter(',');
  eval->add_option("--sweep-widths", eval_sweep,
                   "Regenerate labels per width and report the grid")
      ->delimiter(',');
  eval->add_option("--seed", eval_seed, "Base seed for sweep regeneration")
      ->capture_default_str();
  add_fit_flags(eval, eval_fit);
  add_raster_flags(eval, eval_raster);
  add_corruption_flags(eval, eval_corruption);
  eval->callback([&] {
    rc = cmd_eval(eval_dir, eval_out, eval_fit, eval_raster, eval_corruption,
                  eval_thresholds, eval_sweep, eval_seed);
  });

  // rasterize
  auto* raster = app.add_subcommand("rasterize",
                                    "Rasterize an annotation into a label");
  std::string raster_annotation, raster_out;
  RasterFlags raster_flags;
  raster->add_option("annotation", raster_annotation, "Annotation JSON")
      ->required();
  raster->add_option("--out", raster_out, "Output HVAH path");
  add_raster_flags(raster, raster_flags);
  raster->callback(
      [&] { rc = cmd_rasterize(raster_annotation, raster_out, raster_flags); });

  // simulate
  auto* simulate = app.add_subcommand("simulate",
                                      "Generate a seeded synthetic dataset");
  int sim_n = 10;
  uint64_t sim_seed = 0;
  std::string sim_out;
  RasterFlags sim_raster;
  CorruptionFlags sim_corruption;
  simulate->add_option("--n", sim_n, "Number of images")
      ->capture_default_str();
  simulate->add_option("--seed", sim_seed, "Base seed")->capture_default_str();
  simulate->add_option("--out", sim_out, "Output directory")->required();
  add_raster_flags(simulate, sim_raster);
  add_corruption_flags(simulate, sim_corruption);
  simulate->callback([&] {
    rc = cmd_simulate(sim_n, sim_seed, sim_out, sim_raster, sim_corruption);
  });

  // keypoints
  auto* keypoints = app.add_subcommand(
      "keypoints", "Keypoint-count baseline vs the dense pipeline");
  int kp_trials = 1000;
  std::vector<int> kp_ks;
  double kp_sigma = 2.0, kp_length = 60.0;
  uint64_t kp_seed = 0;
  RasterFlags kp_raster;
  bool kp_pretty = false;
  keypoints->add_option("--trials", kp_trials, "Number of trials")
      ->capture_default_str();
  keypoints->add_option("--k", kp_ks, "Keypoint counts")->delimiter(',');
  keypoints->add_option("--jitter-sigma", kp_sigma, "Lateral jitter in px")
      ->capture_default_str();
  keypoints->add_option("--segment-length", kp_length, "Segment length in px")
      ->capture_default_str();
  keypoints->add_option("--seed", kp_seed, "Base seed")->capture_default_str();
  add_raster_flags(keypoints, kp_raster);
  keypoints->add_flag("--pretty", kp_pretty, "Human-readable table");
  keypoints->callback([&] {
    rc = cmd_keypoints(kp_trials, kp_ks, kp_sigma, kp_length, kp_seed,
                       kp_raster, kp_pretty);
  });

  // overlay
  auto* overlay = app.add_subcommand("overlay",
                                     "Render fits and points as an SVG");
  std::string ov_heatmap, ov_out;
  FitFlags ov_fit;
  overlay->add_option("heatmap", ov_heatmap, "HVAH heatmap file")->required();
  overlay->add_option("--out", ov_out, "Output SVG path");
  add_fit_flags(overlay, ov_fit);
  overlay->callback([&] { rc = cmd_overlay(ov_heatmap, ov_out, ov_fit); });

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitInput;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return e.is_input_error() ? kExitInput : kExitCompute;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInput;
  }
  return rc;
}
