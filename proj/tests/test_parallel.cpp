#include <doctest.h>

#include <cstdlib>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "linefit/eval.hpp"
#include "linefit/extract.hpp"
#include "linefit/parallel.hpp"
#include "linefit/raster.hpp"
#include "linefit/simulate.hpp"

using namespace linefit;

TEST_SUITE("parallel") {

TEST_CASE("parallel kernels match the serial references bitwise") {
  for (uint64_t seed = 500; seed < 506; ++seed) {
    const Annotation a = gen_annotation(seed);
    const RasterConfig cfg;
    const Heatmap par = rasterize(a.segments, cfg);
    const Heatmap ser = rasterize_reference(a.segments, cfg);
    REQUIRE(par.values == ser.values);

    for (uint32_t ch = 0; ch < 3; ++ch) {
      const PointSet p = extract_points(par, ch);
      const PointSet s = extract_points_reference(ser, ch);
      REQUIRE(p.points.size() == s.points.size());
      for (size_t i = 0; i < p.points.size(); ++i) {
        CHECK(p.points[i].x == s.points[i].x);
        CHECK(p.points[i].y == s.points[i].y);
      }
    }
  }
}

TEST_CASE("evaluate matches its serial reference bitwise") {
  std::vector<EvalCase> dataset;
  for (uint64_t i = 0; i < 10; ++i) {
    EvalCase c;
    c.annotation = gen_annotation(600 + i);
    CorruptionConfig corr;
    corr.drop_rate = 0.3;
    corr.jitter_sigma = 1.0;
    corr.seed = 600 + i;
    c.prediction = simulate_prediction(c.annotation, RasterConfig{}, corr);
    dataset.push_back(std::move(c));
  }
  const EvalReport par = evaluate(dataset, EvalConfig{});
  const EvalReport ser = evaluate_reference(dataset, EvalConfig{});
  REQUIRE(par.rows.size() == ser.rows.size());
  for (size_t i = 0; i < par.rows.size(); ++i) {
    CHECK(par.rows[i].err_alpha == ser.rows[i].err_alpha);
    CHECK(par.rows[i].err_beta == ser.rows[i].err_beta);
    CHECK(par.rows[i].failed == ser.rows[i].failed);
  }
  CHECK(par.summary.mae_alpha == ser.summary.mae_alpha);
  CHECK(par.summary.acc_alpha == ser.summary.acc_alpha);
}

#ifdef _OPENMP
TEST_CASE("results do not depend on the thread count") {
  const Annotation a = gen_annotation(700);
  const int saved = omp_get_max_threads();

  omp_set_num_threads(1);
  const Heatmap one = rasterize(a.segments, RasterConfig{});
  KeypointExperimentConfig kcfg;
  kcfg.n_trials = 64;
  kcfg.seed = 3;
  const KeypointExperimentResult k_one = keypoint_experiment(kcfg);

  omp_set_num_threads(2);
  const Heatmap two = rasterize(a.segments, RasterConfig{});
  const KeypointExperimentResult k_two = keypoint_experiment(kcfg);

  omp_set_num_threads(saved);
  CHECK(one.values == two.values);
  CHECK(k_one.dense_errors == k_two.dense_errors);
  CHECK(k_one.keypoint_errors == k_two.keypoint_errors);
}
#endif

TEST_CASE("LINEFIT_THREADS caps the pool") {
#ifdef _OPENMP
  setenv("LINEFIT_THREADS", "1", 1);
  CHECK(effective_threads() == 1);
  setenv("LINEFIT_THREADS", "not-a-number", 1);
  CHECK(effective_threads() == omp_get_max_threads());
  setenv("LINEFIT_THREADS", "1000000", 1);
  CHECK(effective_threads() == omp_get_max_threads());
  unsetenv("LINEFIT_THREADS");
#else
  CHECK(effective_threads() == 1);
#endif
}

}  // TEST_SUITE
