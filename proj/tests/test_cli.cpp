#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>
#include <sys/wait.h>

#include "linefit/eval.hpp"
#include "linefit/raster.hpp"
#include "linefit/simulate.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace linefit;

namespace {

struct RunResult {
  int code = -1;
  std::string out;
  std::string err;
};

std::string cli_path() {
  const char* env = std::getenv("LINEFIT_CLI");
  REQUIRE_MESSAGE(env != nullptr, "LINEFIT_CLI must point at the binary");
  return env;
}

fs::path scratch_dir() {
  static const fs::path dir = [] {
    fs::path d = fs::temp_directory_path() /
                 ("linefit_cli_" + std::to_string(::getpid()));
    fs::remove_all(d);
    fs::create_directories(d);
    return d;
  }();
  return dir;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

RunResult run(const std::string& args) {
  static int counter = 0;
  const fs::path out = scratch_dir() / ("stdout_" + std::to_string(counter));
  const fs::path err = scratch_dir() / ("stderr_" + std::to_string(counter));
  ++counter;
  const std::string cmd = cli_path() + " " + args + " > " + out.string() +
                          " 2> " + err.string();
  const int status = std::system(cmd.c_str());
  RunResult r;
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  r.out = slurp(out);
  r.err = slurp(err);
  return r;
}

size_t count_of(const std::string& text, const std::string& needle) {
  size_t count = 0, pos = 0;
  while ((pos = text.find(needle, pos)) != std::string::npos) {
    ++count;
    pos += needle.size();
  }
  return count;
}

}  // namespace

TEST_SUITE("cli") {

TEST_CASE("simulate writes a deterministic dataset") {
  const fs::path a = scratch_dir() / "sim_a";
  const fs::path b = scratch_dir() / "sim_b";
  CHECK(run("simulate --n 3 --seed 5 --out " + a.string()).code == 0);
  CHECK(run("simulate --n 3 --seed 5 --out " + b.string()).code == 0);
  int pairs = 0;
  for (int i = 0; i < 3; ++i) {
    char stem[32];
    std::snprintf(stem, sizeof(stem), "img_%05d", i);
    const fs::path ja = a / (std::string(stem) + ".json");
    const fs::path ha = a / (std::string(stem) + ".hvah");
    REQUIRE(fs::exists(ja));
    REQUIRE(fs::exists(ha));
    CHECK(slurp(ja) == slurp(b / ja.filename()));
    CHECK(slurp(ha) == slurp(b / ha.filename()));
    ++pairs;
  }
  CHECK(pairs == 3);
}

TEST_CASE("fit on a clean rasterization matches the annotation") {
  const fs::path dir = scratch_dir() / "fit_clean";
  REQUIRE(run("simulate --n 1 --seed 21 --out " + dir.string()).code == 0);
  const RunResult r = run("fit " + (dir / "img_00000.hvah").string() +
                          " --annotation " + (dir / "img_00000.json").string());
  CHECK(r.code == 0);
  const json out = json::parse(r.out);
  CHECK(out["channels"].size() == 3);
  CHECK(out["err_alpha_deg"].get<double>() < 0.5);
  CHECK(out["err_beta_deg"].get<double>() < 0.5);
  CHECK(out.contains("hva_class"));
}

TEST_CASE("fit on an all-zero heatmap exits 3") {
  const fs::path path = scratch_dir() / "zero.hvah";
  write_hvah_file(Heatmap(128, 256, 3, 4), path);
  const RunResult r = run("fit " + path.string());
  CHECK(r.code == 3);
  CHECK(r.err.find("too few points, channel 0") != std::string::npos);
}

TEST_CASE("fit on a missing or malformed file exits 2") {
  CHECK(run("fit /nonexistent/path.hvah").code == 2);
  const fs::path bad = scratch_dir() / "bad.hvah";
  std::ofstream(bad, std::ios::binary) << "not a heatmap at all";
  CHECK(run("fit " + bad.string()).code == 2);
}

TEST_CASE("welsch beats l2 on blob corruption") {
  const fs::path dir = scratch_dir() / "blobby";
  fs::create_directories(dir);
  const Annotation ann = gen_annotation(9);
  CorruptionConfig corr;
  corr.blob_count = 3;
  corr.blob_radius = 4.0;
  corr.seed = 9 ^ kPredictionStreamSalt;
  write_hvah_file(simulate_prediction(ann, RasterConfig{}, corr),
                  dir / "img.hvah");
  write_annotation_file(ann, (dir / "img.json").string());

  const RunResult welsch =
      run("fit " + (dir / "img.hvah").string() + " --annotation " +
          (dir / "img.json").string() + " --rho welsch");
  const RunResult l2 = run("fit " + (dir / "img.hvah").string() +
                           " --annotation " + (dir / "img.json").string() +
                           " --rho l2");
  REQUIRE(welsch.code == 0);
  REQUIRE(l2.code == 0);
  const double err_w = json::parse(welsch.out)["err_alpha_deg"].get<double>();
  const double err_l2 = json::parse(l2.out)["err_alpha_deg"].get<double>();
  CHECK(json::parse(welsch.out)["alpha_deg"].get<double>() !=
        json::parse(l2.out)["alpha_deg"].get<double>());
  CHECK(err_w < err_l2);
}

TEST_CASE("eval writes rows and summary for a paired directory") {
  const fs::path dir = scratch_dir() / "eval_ds";
  REQUIRE(run("simulate --n 5 --seed 31 --out " + dir.string()).code == 0);
  const fs::path prefix = scratch_dir() / "eval_out";
  const RunResult r = run("eval " + dir.string() + " --out " + prefix.string());
  CHECK(r.code == 0);
  const std::string csv = slurp(prefix.string() + "_rows.csv");
  CHECK(count_of(csv, "\n") == 6);  // header + 5 rows
  const json summary = json::parse(slurp(prefix.string() + "_summary.json"));
  CHECK(summary["n"].get<int>() == 5);
  CHECK(summary["acc"]["alpha"]["3"].get<double>() == 1.0);
  const json echoed = json::parse(r.out);
  CHECK(echoed["n"].get<int>() == 5);
}

TEST_CASE("eval rejects an empty directory") {
  const fs::path dir = scratch_dir() / "eval_empty";
  fs::create_directories(dir);
  CHECK(run("eval " + dir.string()).code == 2);
}

TEST_CASE("eval lists unpaired files and exits 2") {
  const fs::path dir = scratch_dir() / "eval_unpaired";
  fs::create_directories(dir);
  write_annotation_file(gen_annotation(3), (dir / "lonely.json").string());
  const RunResult r = run("eval " + dir.string());
  CHECK(r.code == 2);
  CHECK(r.err.find("lonely.json") != std::string::npos);
}

TEST_CASE("eval sweep reports one summary per width") {
  const fs::path dir = scratch_dir() / "eval_sweep";
  REQUIRE(run("simulate --n 4 --seed 77 --out " + dir.string()).code == 0);
  const fs::path prefix = scratch_dir() / "sweep_out";
  const RunResult r =
      run("eval " + dir.string() + " --out " + prefix.string() +
          " --sweep-widths 1,4 --jitter-sigma 1 --drop-rate 0.5 --seed 7");
  CHECK(r.code == 0);
  const json grid = json::parse(slurp(prefix.string() + "_sweep.json"));
  REQUIRE(grid.size() == 2);
  CHECK(grid[0]["line_width"].get<int>() == 1);
  CHECK(grid[1]["line_width"].get<int>() == 4);
  CHECK(grid[0]["n"].get<int>() == 4);
  const std::string csv = slurp(prefix.string() + "_sweep.csv");
  CHECK(csv.find("line_width,acc_alpha_3,acc_alpha_5") == 0);
}

TEST_CASE("rasterize matches the library output bit for bit") {
  const fs::path dir = scratch_dir() / "raster";
  fs::create_directories(dir);
  const Annotation ann = gen_annotation(55);
  write_annotation_file(ann, (dir / "ann.json").string());
  const fs::path out = dir / "label.hvah";
  CHECK(run("rasterize " + (dir / "ann.json").string() + " --out " +
            out.string())
            .code == 0);
  const Heatmap expected = rasterize(ann.segments, RasterConfig{});
  const Heatmap actual = read_hvah_file(out);
  CHECK(actual.values == expected.values);
  CHECK(actual.scale == expected.scale);
}

TEST_CASE("keypoints prints a deterministic experiment report") {
  const std::string args = "keypoints --trials 50 --seed 3 --k 2,3,4";
  const RunResult a = run(args);
  const RunResult b = run(args);
  CHECK(a.code == 0);
  CHECK(a.out == b.out);
  const json out = json::parse(a.out);
  REQUIRE(out["per_k"].size() == 3);
  CHECK(out["per_k"][0]["k"].get<int>() == 2);
  CHECK(out["dense"].contains("mean_error_deg"));
}

TEST_CASE("overlay writes an SVG with three fitted lines") {
  const fs::path dir = scratch_dir() / "overlay";
  REQUIRE(run("simulate --n 1 --seed 41 --out " + dir.string()).code == 0);
  const fs::path svg_path = dir / "img.svg";
  const RunResult r = run("overlay " + (dir / "img_00000.hvah").string() +
                          " --out " + svg_path.string());
  CHECK(r.code == 0);
  const std::string svg = slurp(svg_path);
  CHECK(svg.rfind("<svg", 0) == 0);
  CHECK(count_of(svg, "<line ") == 3);
  CHECK(count_of(svg, "stroke=\"red\"") == 1);
}

TEST_CASE("bad invocations exit 2") {
  CHECK(run("frobnicate").code == 2);
  CHECK(run("fit").code == 2);
  CHECK(run("fit x.hvah --rho nonsense").code == 2);
}

}  // TEST_SUITE
