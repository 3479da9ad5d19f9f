#include <doctest.h>

#include <cmath>
#include <set>
#include <vector>

#include "linefit/extract.hpp"
#include "linefit/simulate.hpp"

using namespace linefit;

TEST_SUITE("simulate") {

TEST_CASE("annotations are pure functions of the seed") {
  for (const uint64_t seed : {0ull, 1ull, 42ull, 0xdeadbeefull}) {
    const Annotation a = gen_annotation(seed);
    const Annotation b = gen_annotation(seed);
    CHECK(a.image_id == b.image_id);
    for (int i = 0; i < 3; ++i) {
      CHECK(a.segments[i].a.x == b.segments[i].a.x);
      CHECK(a.segments[i].a.y == b.segments[i].a.y);
      CHECK(a.segments[i].b.x == b.segments[i].b.x);
      CHECK(a.segments[i].b.y == b.segments[i].b.y);
    }
    CHECK(*a.gt_alpha == *b.gt_alpha);
    CHECK(*a.gt_beta == *b.gt_beta);
  }
  // Different seeds give different geometry.
  CHECK(gen_annotation(1).segments[0].a.x !=
        gen_annotation(2).segments[0].a.x);
}

TEST_CASE("recomputed angles hit the sampled targets") {
  for (uint64_t seed = 0; seed < 400; ++seed) {
    const Annotation a = gen_annotation(seed);
    const AngleReport r = compute_report(line_from_segment(a.segments[0]),
                                         line_from_segment(a.segments[1]),
                                         line_from_segment(a.segments[2]));
    CHECK(std::abs(r.alpha.value - *a.gt_alpha) < 0.01);
    CHECK(std::abs(r.beta.value - *a.gt_beta) < 0.01);
    for (const Segment& s : a.segments) {
      CHECK(s.a.x >= 0.0);
      CHECK(s.a.x <= 512.0);
      CHECK(s.a.y >= 0.0);
      CHECK(s.a.y <= 1024.0);
      CHECK(s.b.x >= 0.0);
      CHECK(s.b.x <= 512.0);
      CHECK(s.b.y >= 0.0);
      CHECK(s.b.y <= 1024.0);
      CHECK((s.a.x != s.b.x || s.a.y != s.b.y));
    }
  }
}

TEST_CASE("zero alpha target makes the first two axes parallel") {
  const Annotation a = gen_annotation_targets(7, 0.0, 12.0);
  const double alpha = angle_between(line_from_segment(a.segments[0]),
                                     line_from_segment(a.segments[1]))
                           .value;
  CHECK(alpha < 1e-9);
  const double beta = angle_between(line_from_segment(a.segments[1]),
                                    line_from_segment(a.segments[2]))
                          .value;
  CHECK(beta == doctest::Approx(12.0).epsilon(1e-9));
}

TEST_CASE("zero corruption reproduces the clean rasterization") {
  const Annotation a = gen_annotation(99);
  CorruptionConfig c;
  c.seed = 123;
  const Heatmap sim = simulate_prediction(a, RasterConfig{}, c);
  const Heatmap clean = rasterize(a.segments, RasterConfig{});
  CHECK(sim.values == clean.values);
}

TEST_CASE("full dropout leaves nothing to extract") {
  const Annotation a = gen_annotation(100);
  CorruptionConfig c;
  c.drop_rate = 1.0;
  c.seed = 5;
  const Heatmap sim = simulate_prediction(a, RasterConfig{}, c);
  for (uint32_t ch = 0; ch < sim.channels; ++ch)
    CHECK(extract_points(sim, ch).points.empty());
}

TEST_CASE("blob discs follow the documented draw protocol") {
  const Annotation a = gen_annotation(101);
  CorruptionConfig c;
  c.drop_rate = 1.0;  // remove the stroke so only the blobs remain
  c.blob_count = 3;
  c.blob_radius = 4.0;
  c.seed = 77;
  const RasterConfig raster;
  const Heatmap sim = simulate_prediction(a, raster, c);

  // Replay the stream: no jitter draws (sigma 0), one uniform per
  // foreground cell of the clean rasterization, then per blob a channel,
  // an x and a y draw.
  SplitMix64 replay(c.seed);
  const Heatmap clean = rasterize(a.segments, raster);
  for (const float v : clean.values)
    if (v == 1.0f) replay.next_double();
  Heatmap expected(raster.grid_width, raster.grid_height, 3, raster.scale);
  for (int b = 0; b < c.blob_count; ++b) {
    const auto ch = static_cast<uint32_t>(replay.next_below(3));
    const double cx = replay.next_range(0.0, expected.width);
    const double cy = replay.next_range(0.0, expected.height);
    for (uint32_t row = 0; row < expected.height; ++row)
      for (uint32_t col = 0; col < expected.width; ++col)
        if (std::hypot(col + 0.5 - cx, row + 0.5 - cy) <= c.blob_radius)
          expected.at(ch, row, col) =
              std::max(expected.at(ch, row, col), 0.9f);
  }
  CHECK(sim.values == expected.values);

  size_t blob_cells = 0;
  for (const float v : sim.values)
    if (v > 0.5f) ++blob_cells;
  CHECK(blob_cells > 0);
}

TEST_CASE("noise stays clamped to the unit interval") {
  const Annotation a = gen_annotation(102);
  CorruptionConfig c;
  c.noise_sigma = 0.8;
  c.seed = 9;
  const Heatmap sim = simulate_prediction(a, RasterConfig{}, c);
  for (const float v : sim.values) {
    CHECK(v >= 0.0f);
    CHECK(v <= 1.0f);
  }
}

TEST_CASE("corrupted predictions are deterministic in the seed") {
  const Annotation a = gen_annotation(103);
  CorruptionConfig c;
  c.drop_rate = 0.4;
  c.jitter_sigma = 1.5;
  c.noise_sigma = 0.1;
  c.blob_count = 2;
  c.seed = 31337;
  const Heatmap one = simulate_prediction(a, RasterConfig{}, c);
  const Heatmap two = simulate_prediction(a, RasterConfig{}, c);
  CHECK(one.values == two.values);
  c.seed = 31338;
  const Heatmap three = simulate_prediction(a, RasterConfig{}, c);
  CHECK(one.values != three.values);
}

TEST_CASE("keypoint experiment: zero jitter is exact for every k") {
  KeypointExperimentConfig cfg;
  cfg.n_trials = 40;
  cfg.jitter_sigma = 0.0;
  cfg.seed = 11;
  const KeypointExperimentResult r = keypoint_experiment(cfg);
  REQUIRE(r.k_values == std::vector<int>{2, 3, 4});
  // arccos of a dot within one ulp of 1 already reads ~1e-6 degrees, so
  // "exact" means the conditioning floor, not 0.0.
  for (const auto& errs : r.keypoint_errors)
    for (const double e : errs) CHECK(e < 1e-5);
  // The dense route only pays cell quantization, up to ~0.4 deg on a
  // 60 px segment at scale 4.
  for (const double e : r.dense_errors) CHECK(e < 0.5);
}

TEST_CASE("keypoint experiment improves with k and is deterministic") {
  KeypointExperimentConfig cfg;
  cfg.n_trials = 300;
  cfg.seed = 12;
  const KeypointExperimentResult r = keypoint_experiment(cfg);
  const double mean2 = sample_mean(r.keypoint_errors[0]);
  const double mean3 = sample_mean(r.keypoint_errors[1]);
  const double mean4 = sample_mean(r.keypoint_errors[2]);
  const double dense = sample_mean(r.dense_errors);
  CHECK(mean2 > mean3);
  CHECK(mean3 > mean4);
  CHECK(dense < mean4);

  const KeypointExperimentResult again = keypoint_experiment(cfg);
  CHECK(again.dense_errors == r.dense_errors);
  CHECK(again.keypoint_errors == r.keypoint_errors);
}

TEST_CASE("helpers: mean and median") {
  const std::vector<double> xs{4.0, 1.0, 3.0, 2.0};
  CHECK(sample_mean(xs) == doctest::Approx(2.5));
  CHECK(sample_median(xs) == doctest::Approx(2.5));
  const std::vector<double> odd{5.0, 1.0, 3.0};
  CHECK(sample_median(odd) == 3.0);
}

}  // TEST_SUITE
