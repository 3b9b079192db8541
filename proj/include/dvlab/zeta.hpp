#pragma once

#include <cmath>
#include <stdexcept>

#include "dvlab/quadrature.hpp"

namespace dvlab {

namespace detail {

// B_2k / (2k)! for k = 1..6.
inline constexpr double kBernoulliOverFactorial[6] = {
    1.0 / 12.0,            // B2/2!
    -1.0 / 720.0,          // B4/4!
    1.0 / 30240.0,         // B6/6!
    -1.0 / 1209600.0,      // B8/8!
    1.0 / 47900160.0,      // B10/10!
    -691.0 / 1307674368000.0,  // B12/12!
};

struct ZetaTriple {
  double z0, z1, z2;  // zeta(s), zeta'(s), zeta''(s)
};

/// Euler-Maclaurin evaluation of zeta and its first two derivatives for real
/// s > 1.  Every term of the tail expansion is differentiated in closed form,
/// so the result stays accurate arbitrarily close to the pole (the pole part
/// M^(1-s)/(s-1) is exact).
inline ZetaTriple zeta_em_triple(double s, int terms = 10000, int corrections = 6) {
  if (!(s > 1.0)) throw std::domain_error("zeta_em: requires s > 1");
  const double m = static_cast<double>(terms);
  const double lm = std::log(m);

  KahanSum<double> s0, s1, s2;
  for (int n = 1; n <= terms; ++n) {
    const double ln = std::log(static_cast<double>(n));
    const double v = std::exp(-s * ln);
    s0.add(v);
    s1.add(-ln * v);
    s2.add(ln * ln * v);
  }

  // Integral tail M^(1-s)/(s-1) and its s-derivatives.
  const double p = std::exp((1.0 - s) * lm);  // M^(1-s)
  const double u = 1.0 / (s - 1.0);
  double z0 = s0.value() + p * u;
  double z1 = s1.value() + p * (-lm * u - u * u);
  double z2 = s2.value() + p * (lm * lm * u + 2.0 * lm * u * u + 2.0 * u * u * u);

  // Midpoint correction -M^(-s)/2... sign: zeta = partial + tail - M^(-s)/2.
  const double q = std::exp(-s * lm);  // M^(-s)
  z0 -= 0.5 * q;
  z1 -= 0.5 * (-lm) * q;
  z2 -= 0.5 * lm * lm * q;

  // Bernoulli corrections: c_k * P_k(s) * M^(-s-2k+1) with
  // P_k(s) = s (s+1) ... (s+2k-2), tracked with its derivatives.
  double pk = 1.0, pk1 = 0.0, pk2 = 0.0;  // value, d/ds, d2/ds2
  int raised = 0;                          // factors multiplied so far
  for (int k = 1; k <= corrections; ++k) {
    while (raised < 2 * k - 1) {
      const double factor = s + raised;
      pk2 = pk2 * factor + 2.0 * pk1;
      pk1 = pk1 * factor + pk;
      pk = pk * factor;
      ++raised;
    }
    const double e = std::exp((-s - 2.0 * k + 1.0) * lm);  // M^(-s-2k+1)
    const double c = kBernoulliOverFactorial[k - 1];
    z0 += c * pk * e;
    z1 += c * (pk1 - pk * lm) * e;
    z2 += c * (pk2 - 2.0 * pk1 * lm + pk * lm * lm) * e;
  }
  return {z0, z1, z2};
}

}  // namespace detail

/// zeta(s) for real s > 1.
inline double zeta(double s) { return detail::zeta_em_triple(s).z0; }

/// zeta'(s) for real s > 1 (negative).
inline double zeta_d1(double s) { return detail::zeta_em_triple(s).z1; }

/// zeta''(s) = sum (log n)^2 n^(-s) for real s > 1.
inline double zeta_d2(double s) { return detail::zeta_em_triple(s).z2; }

}  // namespace dvlab
