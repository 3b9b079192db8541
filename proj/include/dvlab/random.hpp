#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <random>

namespace dvlab {

/// Seeded generator wrapper.  All sampling in the library goes through this
/// so a seed pins every reported number.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  double uniform() { return unit_(engine_); }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  std::complex<double> unit_circle() {
    const double a = uniform(0.0, 2.0 * M_PI);
    return {std::cos(a), std::sin(a)};
  }

  /// Uniform w.r.t. normalized area on the disc of the given radius.
  std::complex<double> in_disc(double radius = 1.0) {
    const double r = radius * std::sqrt(uniform());
    const double a = uniform(0.0, 2.0 * M_PI);
    return {r * std::cos(a), r * std::sin(a)};
  }

  std::uint64_t integer(std::uint64_t lo, std::uint64_t hi) {
    std::uniform_int_distribution<std::uint64_t> d(lo, hi);
    return d(engine_);
  }

  std::mt19937_64& engine() { return engine_; }

 private:
  std::mt19937_64 engine_;
  std::uniform_real_distribution<double> unit_{0.0, 1.0};
};

}  // namespace dvlab
