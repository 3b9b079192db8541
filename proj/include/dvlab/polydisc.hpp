#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <numeric>
#include <stdexcept>
#include <string>
#include <vector>

#include "dvlab/polydisc_polynomial.hpp"
#include "dvlab/quadrature.hpp"
#include "dvlab/random.hpp"

namespace dvlab {

/// Automorphism of the polydisc: Phi_j(z) = eps_j (z_{perm(j)} - a_j) /
/// (1 - conj(a_j) z_{perm(j)}).  The involution convention (a - z)/(1 - a* z)
/// used by the Garsia norm is eps = -1 with the identity permutation; it
/// fixes Phi(0) = a and Phi(Phi(z)) = z.
struct MobiusTuple {
  std::vector<Complex> center;
  std::vector<Complex> sign;
  std::vector<int> permutation;  // 0-based: coordinate j reads z[permutation[j]]

  static MobiusTuple involution(std::vector<Complex> a) {
    MobiusTuple t;
    const std::size_t d = a.size();
    t.center = std::move(a);
    t.sign.assign(d, Complex(-1.0));
    t.permutation.resize(d);
    std::iota(t.permutation.begin(), t.permutation.end(), 0);
    t.validate();
    return t;
  }

  void validate() const {
    const std::size_t d = center.size();
    if (sign.size() != d || permutation.size() != d)
      throw std::invalid_argument("MobiusTuple: field arity mismatch");
    for (const auto& a : center)
      if (!(std::abs(a) < 1.0))
        throw std::invalid_argument("MobiusTuple: centers must lie in the open disc");
    for (const auto& e : sign)
      if (std::abs(std::abs(e) - 1.0) > 1e-12)
        throw std::invalid_argument("MobiusTuple: signs must have modulus 1");
    std::vector<bool> seen(d, false);
    for (int p : permutation) {
      if (p < 0 || static_cast<std::size_t>(p) >= d || seen[static_cast<std::size_t>(p)])
        throw std::invalid_argument("MobiusTuple: permutation must be a bijection");
      seen[static_cast<std::size_t>(p)] = true;
    }
  }

  std::vector<Complex> apply(const std::vector<Complex>& z) const {
    std::vector<Complex> out(center.size());
    for (std::size_t j = 0; j < center.size(); ++j) {
      const Complex w = z[static_cast<std::size_t>(permutation[j])];
      out[j] = sign[j] * (w - center[j]) / (1.0 - std::conj(center[j]) * w);
    }
    return out;
  }
};

/// Coefficient form of the polydisc Bergman norm: monomials are orthogonal
/// under normalized area measure per factor with |z^k|^2 integrating to
/// 1/(k+1).
inline double bergman_norm_polydisc(const PolydiscPolynomial& f) {
  KahanSum<double> s;
  for (const auto& [idx, c] : f.terms()) {
    double w = 1.0;
    for (std::uint32_t a : idx) w /= static_cast<double>(a + 1);
    s.add(std::norm(c) * w);
  }
  return std::sqrt(s.value());
}

/// Radial/angular sample grid per coordinate.
struct PolydiscGrid {
  std::vector<double> radii;
  int angular = 16;

  static PolydiscGrid standard(int radial = 24, int angular = 16, double r_max = 0.995) {
    PolydiscGrid g;
    g.angular = angular;
    for (int i = 0; i < radial; ++i)
      g.radii.push_back(r_max * static_cast<double>(i) / (radial - 1));
    return g;
  }
};

/// Grid maximum of max_j |D_j f(z)| (1 - |z_j|^2); a lower bound of the sup.
/// The grid is the product of per-coordinate polar grids, so cost grows fast
/// with the dimension; intended for d <= 3.
inline double polydisc_bloch_seminorm(const PolydiscPolynomial& f,
                                      const PolydiscGrid& grid) {
  const int d = f.dimension();
  std::vector<PolydiscPolynomial> partials;
  partials.reserve(static_cast<std::size_t>(d));
  for (int j = 0; j < d; ++j) partials.push_back(f.partial_derivative(j));

  const std::size_t per_coord = grid.radii.size() * static_cast<std::size_t>(grid.angular);
  std::size_t total = 1;
  for (int j = 0; j < d; ++j) {
    if (total > 50'000'000 / per_coord)
      throw std::invalid_argument("polydisc_bloch_seminorm: grid too large");
    total *= per_coord;
  }

  std::vector<Complex> z(static_cast<std::size_t>(d));
  double best = 0.0;
  for (std::size_t flat = 0; flat < total; ++flat) {
    std::size_t rest = flat;
    for (int j = 0; j < d; ++j) {
      const std::size_t q = rest % per_coord;
      rest /= per_coord;
      const double r = grid.radii[q / static_cast<std::size_t>(grid.angular)];
      const double a = 2.0 * M_PI *
                       static_cast<double>(q % static_cast<std::size_t>(grid.angular)) /
                       grid.angular;
      z[static_cast<std::size_t>(j)] = Complex(r * std::cos(a), r * std::sin(a));
    }
    for (int j = 0; j < d; ++j) {
      const double zj2 = std::norm(z[static_cast<std::size_t>(j)]);
      const double v = std::abs(partials[static_cast<std::size_t>(j)].evaluate(z)) *
                       (1.0 - zj2);
      best = std::max(best, v);
    }
  }
  return best;
}

struct MobiusComposition {
  PolydiscPolynomial value;
  double norm_tail_bound = 0.0;  // certified A2-norm bound on the dropped tail
};

namespace detail {

/// Power series of Phi_j(w)^e truncated at degree cap, together with a bound
/// on the A2 norm of the dropped tail.  Phi = eps (w - a)/(1 - a* w) expands
/// as eps (-a + (1-|a|^2) sum_{k>=1} a*^{k-1} w^k).
struct UnivariatePower {
  std::vector<Complex> coeff;
  double tail_norm = 0.0;
};

inline std::vector<Complex> mobius_series(Complex a, Complex eps, std::uint32_t cap) {
  std::vector<Complex> s(cap + 1, Complex(0.0));
  s[0] = -eps * a;
  const Complex lead = eps * (1.0 - std::norm(a));
  Complex pw(1.0);
  for (std::uint32_t k = 1; k <= cap; ++k) {
    s[k] = lead * pw;
    pw *= std::conj(a);
  }
  return s;
}

inline UnivariatePower mobius_power(Complex a, Complex eps, std::uint32_t exponent,
                                    std::uint32_t cap) {
  UnivariatePower out;
  out.coeff.assign(cap + 1, Complex(0.0));
  out.coeff[0] = Complex(1.0);
  if (exponent == 0) return out;
  const std::vector<Complex> base = mobius_series(a, eps, cap);
  for (std::uint32_t e = 0; e < exponent; ++e) {
    std::vector<Complex> next(cap + 1, Complex(0.0));
    for (std::uint32_t i = 0; i <= cap; ++i) {
      if (out.coeff[i] == Complex(0.0)) continue;
      for (std::uint32_t k = 0; k + i <= cap; ++k) next[i + k] += out.coeff[i] * base[k];
    }
    out.coeff = std::move(next);
  }
  // Tail coefficients of Phi^e are bounded by
  // 2^e binom(k+e-1, e-1) |a|^(k-e); sum the squared bound weighted by
  // 1/(k+1) until the geometric decay makes the remainder negligible, then
  // close it off with the geometric series.
  const double r = std::abs(a);
  if (r == 0.0) return out;  // polynomial is exact once cap >= exponent
  const double r2 = r * r;
  double binom = 1.0;  // binom(k+e-1, e-1) at k = cap+1, built incrementally
  for (std::uint32_t i = 1; i < exponent; ++i)
    binom *= static_cast<double>(cap + 1 + i) / static_cast<double>(i);
  double pw = std::pow(r, static_cast<double>(cap + 1) - static_cast<double>(exponent));
  double tail_sq = 0.0;
  double k = static_cast<double>(cap + 1);
  const double scale = std::pow(2.0, static_cast<double>(exponent));
  for (int guard = 0; guard < 200000; ++guard) {
    const double term = scale * binom * pw;
    const double add = term * term / (k + 1.0);
    tail_sq += add;
    if (add < 1e-30 * (1.0 - r2) || add < tail_sq * 1e-18) {
      // remaining terms shrink at least by q per step once k >> exponent
      const double growth = (k + static_cast<double>(exponent)) / (k + 1.0);
      const double q = std::min(0.9999, r2 * growth * growth);
      tail_sq += add * q / (1.0 - q);
      break;
    }
    binom *= (k + static_cast<double>(exponent)) / (k + 1.0);
    pw *= r;
    k += 1.0;
  }
  out.tail_norm = std::sqrt(tail_sq);
  return out;
}

}  // namespace detail

namespace detail {

struct ComposedTensor {
  int dimension = 1;
  std::size_t stride = 1;               // degree_cap + 1
  std::vector<Complex> values;          // flat, last coordinate fastest
  double tail = 0.0;                    // certified A2 bound on dropped terms
};

/// Expand f o Phi into a flat coefficient tensor.  Shared by the public
/// composition and the fused norm paths (the map form is too slow for the
/// randomized audits).
inline ComposedTensor compose_tensor(const PolydiscPolynomial& f, const MobiusTuple& phi,
                                     std::uint32_t degree_cap) {
  phi.validate();
  const int d = f.dimension();
  if (static_cast<int>(phi.center.size()) != d)
    throw std::invalid_argument("mobius_compose: dimension mismatch");
  for (int j = 0; j < d; ++j) {
    if (degree_cap < f.degree(j))
      throw std::invalid_argument("mobius_compose: degree_cap below input degree");
  }

  // Output coordinate of Phi_j is variable perm[j]; precompute the powers of
  // each univariate factor that actually occur.
  std::vector<std::vector<UnivariatePower>> powers(static_cast<std::size_t>(d));
  for (int j = 0; j < d; ++j) {
    const std::uint32_t dj = f.degree(j);
    powers[static_cast<std::size_t>(j)].reserve(dj + 1);
    for (std::uint32_t e = 0; e <= dj; ++e) {
      powers[static_cast<std::size_t>(j)].push_back(
          mobius_power(phi.center[static_cast<std::size_t>(j)],
                       phi.sign[static_cast<std::size_t>(j)], e, degree_cap));
    }
  }

  ComposedTensor out;
  out.dimension = d;
  out.stride = degree_cap + 1;
  std::size_t total = 1;
  for (int j = 0; j < d; ++j) {
    if (total > 100'000'000 / out.stride)
      throw std::invalid_argument("mobius_compose: tensor too large, lower degree_cap");
    total *= out.stride;
  }
  out.values.assign(total, Complex(0.0));

  std::vector<const std::vector<Complex>*> factors(static_cast<std::size_t>(d));
  // rank-1 accumulation per source term, recursing over coordinates with an
  // incremental prefix product; the innermost loop is a plain axpy
  auto accumulate = [&](auto&& self, int coord, std::size_t offset,
                        Complex prefix) -> void {
    const auto& fac = *factors[static_cast<std::size_t>(coord)];
    if (coord == d - 1) {
      Complex* slot = out.values.data() + offset * out.stride;
      for (std::size_t k = 0; k < out.stride; ++k) slot[k] += prefix * fac[k];
      return;
    }
    for (std::size_t k = 0; k < out.stride; ++k) {
      if (fac[k] != Complex(0.0)) self(self, coord + 1, offset * out.stride + k, prefix * fac[k]);
    }
  };

  for (const auto& [idx, c] : f.terms()) {
    double term_tail = 0.0;
    for (int j = 0; j < d; ++j) {
      const auto& up =
          powers[static_cast<std::size_t>(j)][idx[static_cast<std::size_t>(j)]];
      factors[static_cast<std::size_t>(phi.permutation[static_cast<std::size_t>(j)])] =
          &up.coeff;
      term_tail += up.tail_norm;  // the other factors all have A2 norm <= 1
    }
    out.tail += std::abs(c) * term_tail;
    accumulate(accumulate, 0, 0, c);
  }
  return out;
}

/// A2 norm of the tensor after subtracting `constant` from the 0 index.
inline double tensor_centered_norm(const ComposedTensor& t, Complex constant) {
  const int d = t.dimension;
  std::vector<double> weight(t.stride);
  for (std::size_t k = 0; k < t.stride; ++k) weight[k] = 1.0 / static_cast<double>(k + 1);
  KahanSum<double> acc;
  auto walk = [&](auto&& self, int coord, std::size_t offset, double w) -> void {
    if (coord == d - 1) {
      const Complex* slot = t.values.data() + offset * t.stride;
      for (std::size_t k = 0; k < t.stride; ++k) {
        Complex v = slot[k];
        if (offset == 0 && k == 0) v -= constant;
        if (v != Complex(0.0)) acc.add(std::norm(v) * w * weight[k]);
      }
      return;
    }
    for (std::size_t k = 0; k < t.stride; ++k)
      self(self, coord + 1, offset * t.stride + k, w * weight[k]);
  };
  walk(walk, 0, 0, 1.0);
  return std::sqrt(acc.value());
}

}  // namespace detail

/// Taylor expansion of f o Phi truncated at `degree_cap` per coordinate,
/// with a certified bound on the A2 norm of the truncation tail.
inline MobiusComposition mobius_compose(const PolydiscPolynomial& f,
                                        const MobiusTuple& phi,
                                        std::uint32_t degree_cap) {
  detail::ComposedTensor t = detail::compose_tensor(f, phi, degree_cap);
  const int d = t.dimension;
  PolydiscPolynomial out(d);
  PolydiscPolynomial::Index midx(static_cast<std::size_t>(d), 0);
  for (std::size_t flat = 0; flat < t.values.size(); ++flat) {
    if (t.values[flat] == Complex(0.0)) continue;
    std::size_t rest = flat;
    for (int v = d - 1; v >= 0; --v) {
      midx[static_cast<std::size_t>(v)] = static_cast<std::uint32_t>(rest % t.stride);
      rest /= t.stride;
    }
    out.add_term(midx, t.values[flat]);
  }
  return {std::move(out), t.tail};
}

struct GarsiaResult {
  double value = 0.0;            // max over centers of |f o Phi_a - f(a)|_{A2}
  double max_tail_bound = 0.0;   // worst certified truncation bound among centers
};

/// Lower bound for sup_a |f o Phi_a - f(a)|_{A2(D^d)} over the supplied
/// centers.
inline GarsiaResult garsia_norm(const PolydiscPolynomial& f,
                                const std::vector<MobiusTuple>& centers,
                                std::uint32_t degree_cap) {
  if (centers.empty()) throw std::invalid_argument("garsia_norm: centers required");
  GarsiaResult res;
  const std::int64_t n = static_cast<std::int64_t>(centers.size());
  std::vector<double> values(centers.size()), tails(centers.size());
#pragma omp parallel for schedule(dynamic)
  for (std::int64_t i = 0; i < n; ++i) {
    const auto& phi = centers[static_cast<std::size_t>(i)];
    auto tensor = detail::compose_tensor(f, phi, degree_cap);
    values[static_cast<std::size_t>(i)] =
        detail::tensor_centered_norm(tensor, f.evaluate(phi.center));
    tails[static_cast<std::size_t>(i)] = tensor.tail;
  }
  for (std::size_t i = 0; i < centers.size(); ++i) {
    res.value = std::max(res.value, values[i]);
    res.max_tail_bound = std::max(res.max_tail_bound, tails[i]);
  }
  return res;
}

struct RadicalityEntry {
  std::size_t center_index = 0;
  double lhs = 0.0;    // |f^m o Phi - f^m(a)|^(1/m)
  double rhs = 0.0;    // |f^n o Phi - f^n(a)|^(1/n)
  double slack = 0.0;  // certified truncation allowance
  bool violation = false;
};

struct RadicalityReport {
  std::vector<RadicalityEntry> entries;
  bool any_violation = false;
};

/// Checks |f^m o Phi_a - f^m(a)|^(1/m) <= |f^n o Phi_a - f^n(a)|^(1/n) at
/// each center, counting a violation only when it exceeds the certified
/// truncation slack.
inline RadicalityReport radicality_check(const PolydiscPolynomial& f, int n, int m,
                                         const std::vector<MobiusTuple>& centers,
                                         std::uint32_t degree_cap) {
  if (m < 1 || n < m) throw std::invalid_argument("radicality_check: need 1 <= m <= n");
  for (int j = 0; j < f.dimension(); ++j) {
    if (degree_cap < static_cast<std::uint32_t>(n) * f.degree(j))
      throw std::invalid_argument("radicality_check: degree_cap below n * deg f");
  }
  const PolydiscPolynomial fm = power(f, m);
  const PolydiscPolynomial fn = power(f, n);
  RadicalityReport report;
  report.entries.resize(centers.size());
  const std::int64_t count = static_cast<std::int64_t>(centers.size());
#pragma omp parallel for schedule(dynamic)
  for (std::int64_t i = 0; i < count; ++i) {
    const auto& phi = centers[static_cast<std::size_t>(i)];
    auto tm = detail::compose_tensor(fm, phi, degree_cap);
    auto tn = detail::compose_tensor(fn, phi, degree_cap);
    const Complex fa = f.evaluate(phi.center);
    Complex fam(1.0), fan(1.0);
    for (int k = 0; k < m; ++k) fam *= fa;
    for (int k = 0; k < n; ++k) fan *= fa;
    const double lhs_norm = detail::tensor_centered_norm(tm, fam);
    const double rhs_norm = detail::tensor_centered_norm(tn, fan);

    RadicalityEntry e;
    e.center_index = static_cast<std::size_t>(i);
    e.lhs = std::pow(lhs_norm, 1.0 / m);
    e.rhs = std::pow(rhs_norm, 1.0 / n);
    // give the inequality both truncation allowances before flagging
    const double lhs_min = std::pow(std::max(0.0, lhs_norm - tm.tail), 1.0 / m);
    const double rhs_max = std::pow(rhs_norm + tn.tail, 1.0 / n);
    e.slack = rhs_max - e.rhs + e.lhs - lhs_min;
    e.violation = lhs_min > rhs_max + 1e-12;
    report.entries[static_cast<std::size_t>(i)] = e;
  }
  for (const auto& e : report.entries)
    report.any_violation = report.any_violation || e.violation;
  return report;
}

/// Low-discrepancy-ish deterministic centers in the polydisc of the given
/// radius (involution tuples, as the Garsia norm uses).
inline std::vector<MobiusTuple> sample_centers(int d, std::size_t count, double radius,
                                               std::uint64_t seed) {
  Rng rng(seed);
  std::vector<MobiusTuple> out;
  out.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    std::vector<Complex> a(static_cast<std::size_t>(d));
    for (auto& c : a) c = rng.in_disc(radius);
    out.push_back(MobiusTuple::involution(std::move(a)));
  }
  return out;
}

}  // namespace dvlab
