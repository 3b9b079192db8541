#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>

#include "dvlab/quadrature.hpp"
#include "dvlab/zeta.hpp"

namespace dvlab {

/// Norm of the point evaluation on the coefficient-l2 space at Re s = sigma:
/// zeta(2 sigma)^(1/2).  Diverges at sigma = 1/2.
inline double eval_functional_h2(double sigma) {
  if (!(sigma > 0.5)) throw std::domain_error("eval_functional_h2: sigma must be > 1/2");
  return std::sqrt(zeta(2.0 * sigma));
}

/// Norm of the derivative evaluation f -> f'(s):
/// (sum_{n >= 2} (log n)^2 n^(-2 sigma))^(1/2) = zeta''(2 sigma)^(1/2).
inline double eval_deriv_functional_h2(double sigma) {
  if (!(sigma > 0.5))
    throw std::domain_error("eval_deriv_functional_h2: sigma must be > 1/2");
  return std::sqrt(zeta_d2(2.0 * sigma));
}

struct DeltaFunctionalBounds {
  double lower;  // log(1/sigma)/e
  double upper;  // 1 + log(1/sigma)
};

/// Two-sided bracket for the evaluation functional on the half-plane Bloch
/// space at real part sigma in (0, 1).
inline DeltaFunctionalBounds bloch_delta_functional_bounds(double sigma) {
  if (!(sigma > 0.0 && sigma < 1.0))
    throw std::domain_error("bloch_delta_functional_bounds: sigma must lie in (0,1)");
  constexpr double kE = 2.718281828459045;
  const double l = std::log(1.0 / sigma);
  return {l / kE, 1.0 + l};
}

/// Value at sigma of the lower-bound witness sum_{n>=2} n^(-s)/(n log n),
/// summed directly to `terms` terms (no coefficient array is materialized;
/// the default handles 10^7 terms in a few seconds).
inline double bloch_delta_witness_value(double sigma, std::uint64_t terms = 10000000) {
  if (!(sigma > 0.0)) throw std::domain_error("witness: sigma must be positive");
  KahanSum<double> s;
  for (std::uint64_t n = 2; n <= terms; ++n) {
    const double ln = std::log(static_cast<double>(n));
    s.add(std::exp(-(sigma + 1.0) * ln) / ln);
  }
  return s.value();
}

}  // namespace dvlab
