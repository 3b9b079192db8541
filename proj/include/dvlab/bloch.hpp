#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <utility>
#include <vector>

#include "dvlab/dirichlet_series.hpp"
#include "dvlab/measure.hpp"

namespace dvlab {

/// Sample grid for strip suprema: geometric sigma points in (sigma_min, 1],
/// uniform t points in [-T, T].
struct StripGrid {
  std::vector<double> sigma_points;
  std::vector<double> t_points;

  static StripGrid geometric(double sigma_min = std::ldexp(1.0, -20),
                             double sigma_max = 1.0, int n_sigma = 200,
                             double t_max = 50.0, int n_t = 401) {
    if (!(sigma_min > 0.0) || !(sigma_max > sigma_min))
      throw std::invalid_argument("StripGrid: need 0 < sigma_min < sigma_max");
    StripGrid g;
    g.sigma_points.reserve(static_cast<std::size_t>(n_sigma));
    const double ratio = std::log(sigma_max / sigma_min);
    for (int i = 0; i < n_sigma; ++i) {
      const double t = n_sigma == 1 ? 1.0 : static_cast<double>(i) / (n_sigma - 1);
      // exp can overshoot the endpoint by an ulp
      g.sigma_points.push_back(std::min(sigma_max, sigma_min * std::exp(ratio * t)));
    }
    g.t_points.reserve(static_cast<std::size_t>(n_t));
    for (int i = 0; i < n_t; ++i) {
      const double t = n_t == 1 ? 0.5 : static_cast<double>(i) / (n_t - 1);
      g.t_points.push_back(-t_max + 2.0 * t_max * t);
    }
    return g;
  }
};

/// Weight omega(sigma) on (0, 1] selecting which Bloch-type space the strip
/// seminorm measures.
class BlochWeight {
 public:
  enum class Kind { Classical, MuDerived, LogCorrected, PowerLaw };

  static BlochWeight classical() { return BlochWeight(Kind::Classical); }

  static BlochWeight log_corrected() { return BlochWeight(Kind::LogCorrected); }

  static BlochWeight power_law(double delta) {
    if (!(delta > 0.0)) throw std::invalid_argument("power_law: delta > 0");
    BlochWeight w(Kind::PowerLaw);
    w.delta_ = delta;
    return w;
  }

  static BlochWeight mu_derived(AdmissibleMeasure mu, QuadratureConfig cfg = {}) {
    BlochWeight w(Kind::MuDerived);
    w.mu_ = std::move(mu);
    w.cfg_ = cfg;
    return w;
  }

  Kind kind() const { return kind_; }

  double operator()(double sigma) const {
    if (!(sigma > 0.0) || sigma > 1.0)
      throw std::domain_error("BlochWeight: sigma must lie in (0, 1]");
    switch (kind_) {
      case Kind::Classical:
        return sigma;
      case Kind::LogCorrected:
        return sigma * (1.0 + std::log(1.0 / sigma));
      case Kind::PowerLaw:
        return std::pow(sigma, delta_);
      case Kind::MuDerived:
        return omega(mu_, sigma, cfg_);
    }
    return sigma;
  }

 private:
  explicit BlochWeight(Kind k) : kind_(k) {}

  Kind kind_;
  double delta_ = 1.0;
  AdmissibleMeasure mu_ = AdmissibleMeasure::mu_alpha(0.0);
  QuadratureConfig cfg_;
};

namespace detail {

struct DerivativeTerms {
  std::vector<double> log_n;
  std::vector<Complex> coeff;  // a_n log n
};

inline DerivativeTerms derivative_terms(const DirichletSeries& f) {
  DerivativeTerms t;
  f.for_each([&](std::uint64_t n, Complex a) {
    if (n < 2) return;
    const double ln = std::log(static_cast<double>(n));
    t.log_n.push_back(ln);
    t.coeff.push_back(a * ln);
  });
  return t;
}

}  // namespace detail

/// |f'(sigma + it)| from the coefficient sum.
inline double derivative_abs_at(const detail::DerivativeTerms& t, double sigma, double tt) {
  KahanSum<double> re, im;
  for (std::size_t i = 0; i < t.log_n.size(); ++i) {
    const double damp = std::exp(-sigma * t.log_n[i]);
    const double phase = -tt * t.log_n[i];
    const Complex v = t.coeff[i] * Complex(std::cos(phase), std::sin(phase)) * damp;
    re.add(v.real());
    im.add(v.imag());
  }
  return std::hypot(re.value(), im.value());
}

/// Grid maximum of omega(sigma) |f'(sigma + it)| over the strip.  A lower
/// bound for the essential sup; for single-signed real coefficient series the
/// t-maximum sits at t = 0 and only that line is evaluated.
inline double bloch_seminorm(const DirichletSeries& f, const BlochWeight& weight,
                             const StripGrid& grid) {
  const auto terms = detail::derivative_terms(f);
  if (terms.log_n.empty()) return 0.0;
  const bool t_zero_only = f.has_aligned_real_coefficients();
  double best = 0.0;
  const std::int64_t n_sigma = static_cast<std::int64_t>(grid.sigma_points.size());
#pragma omp parallel for schedule(dynamic) reduction(max : best)
  for (std::int64_t i = 0; i < n_sigma; ++i) {
    const double sigma = grid.sigma_points[static_cast<std::size_t>(i)];
    const double w = weight(sigma);
    double local = 0.0;
    if (t_zero_only) {
      KahanSum<double> s;
      for (std::size_t k = 0; k < terms.log_n.size(); ++k)
        s.add(std::abs(terms.coeff[k]) * std::exp(-sigma * terms.log_n[k]));
      local = s.value();
    } else {
      for (double tt : grid.t_points)
        local = std::max(local, derivative_abs_at(terms, sigma, tt));
    }
    best = std::max(best, w * local);
  }
  return best;
}

/// Per-sigma profile omega(sigma)|f'(sigma)| along t = 0, for curve emission.
inline std::vector<std::pair<double, double>> bloch_profile(
    const DirichletSeries& f, const BlochWeight& weight,
    const std::vector<double>& sigmas) {
  const auto terms = detail::derivative_terms(f);
  std::vector<std::pair<double, double>> out(sigmas.size());
  const std::int64_t n = static_cast<std::int64_t>(sigmas.size());
#pragma omp parallel for schedule(dynamic)
  for (std::int64_t i = 0; i < n; ++i) {
    const double sigma = sigmas[static_cast<std::size_t>(i)];
    out[static_cast<std::size_t>(i)] = {
        sigma, weight(sigma) * derivative_abs_at(terms, sigma, 0.0)};
  }
  return out;
}

/// Block sums (log x)^(1-delta) * sum_{x <= n <= x^2} a_n for nonnegative
/// real coefficient series; boundedness of the result is the membership
/// indicator for the power-law Bloch space of exponent delta.
inline std::vector<std::pair<double, double>> block_sum_criterion(
    const DirichletSeries& f, double delta, const std::vector<double>& x_values) {
  if (!(delta > 0.0)) throw std::invalid_argument("block_sum_criterion: delta > 0");
  f.for_each([](std::uint64_t n, Complex a) {
    if (a.imag() != 0.0 || a.real() < 0.0)
      throw std::invalid_argument(
          "block_sum_criterion: coefficients must be nonnegative reals (index " +
          std::to_string(n) + ")");
  });
  constexpr double kE = 2.718281828459045;
  std::vector<std::pair<double, double>> out;
  out.reserve(x_values.size());
  for (double x : x_values) {
    if (!(x >= kE)) throw std::invalid_argument("block_sum_criterion: x must be >= e");
    const double x_sq = x * x;
    if (x_sq > static_cast<double>(f.truncation()))
      throw std::out_of_range("block_sum_criterion: x^2 exceeds truncation");
    KahanSum<double> s;
    f.for_each([&](std::uint64_t n, Complex a) {
      const double nd = static_cast<double>(n);
      if (nd >= x && nd <= x_sq) s.add(a.real());
    });
    out.emplace_back(x, std::pow(std::log(x), 1.0 - delta) * s.value());
  }
  return out;
}

/// Ratios |a_n| log(n) omega(1/log n) / (e * norm_estimate) for n >= 3.
/// All ratios stay <= 1 whenever norm_estimate really bounds the full
/// Bloch-type norm (strip seminorm plus the H-infinity term on Re s > 1).
inline std::vector<std::pair<std::uint64_t, double>> coefficient_bound_check(
    const DirichletSeries& f, const BlochWeight& weight, double bloch_norm_estimate) {
  constexpr double kE = 2.718281828459045;
  std::vector<std::pair<std::uint64_t, double>> out;
  f.for_each([&](std::uint64_t n, Complex a) {
    if (n < 3) return;
    const double ln = std::log(static_cast<double>(n));
    const double ratio =
        std::abs(a) * ln * weight(1.0 / ln) / (kE * bloch_norm_estimate);
    out.emplace_back(n, ratio);
  });
  return out;
}

inline std::vector<std::pair<std::uint64_t, double>> coefficient_bound_check(
    const DirichletSeries& f, const AdmissibleMeasure& mu, double bloch_norm_estimate,
    const QuadratureConfig& cfg = {}) {
  return coefficient_bound_check(f, BlochWeight::mu_derived(mu, cfg),
                                 bloch_norm_estimate);
}

}  // namespace dvlab
