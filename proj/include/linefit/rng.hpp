#pragma once

#include <cmath>
#include <cstdint>

namespace linefit {

/// SplitMix64. Chosen over std::mt19937 because the standard library's
/// distributions are not bit-portable; every draw here is fully specified,
/// so a reimplementation in another language reproduces identical streams.
///
/// Draw protocol (documented for cross-language reproduction):
///   next()              state += 0x9e3779b97f4a7c15, then finalize
///   next_double()       (next() >> 11) * 2^-53, in [0, 1)
///   next_range(a, b)    a + next_double() * (b - a)
///   next_below(n)       next() % n
///   next_gaussian()     Box-Muller from two next_double() draws:
///                       sqrt(-2 ln(1-u1)) * cos(2 pi u2)
///                       (one gaussian per pair; the sine branch is unused)
class SplitMix64 {
 public:
  explicit SplitMix64(uint64_t seed) : state_(seed) {}

  uint64_t next() {
    state_ += 0x9e3779b97f4a7c15ULL;
    uint64_t z = state_;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  double next_double() {
    return static_cast<double>(next() >> 11) * 0x1.0p-53;
  }

  double next_range(double lo, double hi) {
    return lo + next_double() * (hi - lo);
  }

  uint64_t next_below(uint64_t n) { return next() % n; }

  bool next_bool() { return (next() & 1) != 0; }

  double next_gaussian(double mean = 0.0, double sigma = 1.0) {
    const double u1 = next_double();
    const double u2 = next_double();
    const double mag = std::sqrt(-2.0 * std::log(1.0 - u1));
    return mean + sigma * mag * std::cos(2.0 * M_PI * u2);
  }

 private:
  uint64_t state_;
};

/// Decouples the corruption stream from the annotation stream derived from
/// the same per-image seed.
constexpr uint64_t kPredictionStreamSalt = 0xd1b54a32d192ed03ULL;

}  // namespace linefit
