#include <doctest.h>

#include <cmath>

#include "linefit/angles.hpp"
#include "linefit/rng.hpp"

using namespace linefit;

namespace {

Line line_at_degrees(double deg) {
  const double rad = deg * M_PI / 180.0;
  // Tilt the vertical axis through the origin by deg.
  return canonicalize({std::cos(rad), std::sin(rad), 0.0});
}

int rank(Severity s) { return static_cast<int>(s); }

}  // namespace

TEST_SUITE("angles") {

TEST_CASE("identical lines give zero angles and normal classes") {
  const Line l = line_at_degrees(10.0);
  const AngleReport r = compute_report(l, l, l);
  CHECK(r.alpha.value == doctest::Approx(0.0));
  CHECK(r.beta.value == doctest::Approx(0.0));
  CHECK(r.hva_class == Severity::kNormal);
  CHECK(r.ima_class == Severity::kNormal);
}

TEST_CASE("moderate deformity angles") {
  const AngleReport r = compute_report(line_at_degrees(25.0),
                                       line_at_degrees(0.0),
                                       line_at_degrees(-13.0));
  CHECK(r.alpha.value == doctest::Approx(25.0).epsilon(1e-9));
  CHECK(r.beta.value == doctest::Approx(13.0).epsilon(1e-9));
  CHECK(r.hva_class == Severity::kModerate);
  CHECK(r.ima_class == Severity::kModerate);
}

TEST_CASE("orthogonal lines are severe") {
  const AngleReport r = compute_report(line_at_degrees(90.0),
                                       line_at_degrees(0.0),
                                       line_at_degrees(0.0));
  CHECK(r.alpha.value == doctest::Approx(90.0));
  CHECK(r.hva_class == Severity::kSevere);
}

TEST_CASE("severity boundaries land on the documented intervals") {
  // HVA: [0,15) normal, [15,21) mild, [21,40) moderate, [40,90] severe.
  CHECK(classify_hva({14.999}) == Severity::kNormal);
  CHECK(classify_hva({15.0}) == Severity::kMild);
  CHECK(classify_hva({20.0}) == Severity::kMild);
  CHECK(classify_hva({20.5}) == Severity::kMild);
  CHECK(classify_hva({21.0}) == Severity::kModerate);
  CHECK(classify_hva({39.0}) == Severity::kModerate);
  CHECK(classify_hva({39.999}) == Severity::kModerate);
  CHECK(classify_hva({40.0}) == Severity::kSevere);
  CHECK(classify_hva({90.0}) == Severity::kSevere);

  // IMA: [0,9) normal, [9,12) mild, [12,18) moderate, [18,90] severe.
  CHECK(classify_ima({8.999}) == Severity::kNormal);
  CHECK(classify_ima({9.0}) == Severity::kMild);
  CHECK(classify_ima({11.0}) == Severity::kMild);
  CHECK(classify_ima({11.5}) == Severity::kMild);
  CHECK(classify_ima({12.0}) == Severity::kModerate);
  CHECK(classify_ima({17.0}) == Severity::kModerate);
  CHECK(classify_ima({18.0}) == Severity::kSevere);
  CHECK(classify_ima({90.0}) == Severity::kSevere);
}

TEST_CASE("classification is monotone and total") {
  SplitMix64 rng(83);
  for (int i = 0; i < 2000; ++i) {
    const double lo = rng.next_range(0.0, 90.0);
    const double hi = rng.next_range(0.0, 90.0);
    const double a = std::min(lo, hi), b = std::max(lo, hi);
    CHECK(rank(classify_hva({a})) <= rank(classify_hva({b})));
    CHECK(rank(classify_ima({a})) <= rank(classify_ima({b})));
  }
}

TEST_CASE("severity names") {
  CHECK(std::string(severity_name(Severity::kNormal)) == "normal");
  CHECK(std::string(severity_name(Severity::kMild)) == "mild");
  CHECK(std::string(severity_name(Severity::kModerate)) == "moderate");
  CHECK(std::string(severity_name(Severity::kSevere)) == "severe");
}

}  // TEST_SUITE
