#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "dvlab/quadrature.hpp"

namespace dvlab {

enum class MeasureFamily { MuAlpha, NuGamma, LogSquare, Tabulated };

namespace detail {

/// Monotone cubic (Fritsch-Carlson) interpolant; preserves nonnegativity of
/// nonnegative data, which a plain cubic spline would not.
class MonotoneCubic {
 public:
  MonotoneCubic() = default;
  MonotoneCubic(std::vector<double> x, std::vector<double> y)
      : x_(std::move(x)), y_(std::move(y)) {
    const std::size_t n = x_.size();
    if (n < 2) throw std::invalid_argument("MonotoneCubic: need at least 2 samples");
    slopes_.assign(n, 0.0);
    std::vector<double> d(n - 1);
    for (std::size_t i = 0; i + 1 < n; ++i) {
      const double h = x_[i + 1] - x_[i];
      if (h <= 0) throw std::invalid_argument("MonotoneCubic: abscissae must increase");
      d[i] = (y_[i + 1] - y_[i]) / h;
    }
    slopes_[0] = d[0];
    slopes_[n - 1] = d[n - 2];
    for (std::size_t i = 1; i + 1 < n; ++i) {
      slopes_[i] = (d[i - 1] * d[i] > 0) ? 2.0 / (1.0 / d[i - 1] + 1.0 / d[i]) : 0.0;
    }
    for (std::size_t i = 0; i + 1 < n; ++i) {
      if (d[i] == 0.0) {
        slopes_[i] = slopes_[i + 1] = 0.0;
      } else {
        const double a = slopes_[i] / d[i];
        const double b = slopes_[i + 1] / d[i];
        const double s = a * a + b * b;
        if (s > 9.0) {
          const double t = 3.0 / std::sqrt(s);
          slopes_[i] = t * a * d[i];
          slopes_[i + 1] = t * b * d[i];
        }
      }
    }
  }

  double x_min() const { return x_.front(); }
  double x_max() const { return x_.back(); }

  double operator()(double x) const {
    if (x < x_.front() || x > x_.back()) return 0.0;
    auto it = std::upper_bound(x_.begin(), x_.end(), x);
    std::size_t i = (it == x_.begin()) ? 0 : static_cast<std::size_t>(it - x_.begin()) - 1;
    if (i + 1 >= x_.size()) i = x_.size() - 2;
    const double h = x_[i + 1] - x_[i];
    const double t = (x - x_[i]) / h;
    const double t2 = t * t, t3 = t2 * t;
    return y_[i] * (2 * t3 - 3 * t2 + 1) + h * slopes_[i] * (t3 - 2 * t2 + t) +
           y_[i + 1] * (-2 * t3 + 3 * t2) + h * slopes_[i + 1] * (t3 - t2);
  }

  const std::vector<double>& knots() const { return x_; }

 private:
  std::vector<double> x_, y_;
  std::vector<double> slopes_;
};

}  // namespace detail

/// A probability measure on (0, inf) with 0 in its support, given by one of
/// the named density families or a tabulated density.
class AdmissibleMeasure {
 public:
  static AdmissibleMeasure mu_alpha(double alpha) {
    if (!(alpha > -1.0)) throw std::invalid_argument("mu_alpha: requires alpha > -1");
    AdmissibleMeasure m;
    m.family_ = MeasureFamily::MuAlpha;
    m.alpha_ = alpha;
    m.normalization_ = std::pow(2.0, alpha + 1.0) / std::tgamma(alpha + 1.0);
    return m;
  }

  static AdmissibleMeasure nu_gamma(double gamma) {
    if (!(gamma > 1.0)) throw std::invalid_argument("nu_gamma: requires gamma > 1");
    AdmissibleMeasure m;
    m.family_ = MeasureFamily::NuGamma;
    m.gamma_ = gamma;
    m.normalization_ = 1.0;
    QuadratureConfig tight;
    tight.abs_tol = 1e-14;
    tight.rel_tol = 1e-12;
    const double raw = m.integrate([](double) { return 1.0; }, 0.0, 1.0, tight);
    m.normalization_ = 1.0 / raw;
    return m;
  }

  static AdmissibleMeasure log_square() {
    AdmissibleMeasure m;
    m.family_ = MeasureFamily::LogSquare;
    m.normalization_ = 1.0;  // the density integrates to 1 exactly
    return m;
  }

  static AdmissibleMeasure tabulated(std::vector<std::pair<double, double>> samples) {
    if (samples.size() < 2) throw std::invalid_argument("tabulated: need >= 2 samples");
    std::sort(samples.begin(), samples.end());
    std::vector<double> lx, y;
    lx.reserve(samples.size());
    y.reserve(samples.size());
    for (const auto& [s, h] : samples) {
      if (!(s > 0.0)) throw std::invalid_argument("tabulated: sigma must be positive");
      if (h < 0.0) throw std::invalid_argument("tabulated: density must be nonnegative");
      lx.push_back(std::log(s));
      y.push_back(h);
    }
    AdmissibleMeasure m;
    m.family_ = MeasureFamily::Tabulated;
    m.interp_ = detail::MonotoneCubic(std::move(lx), std::move(y));
    m.tab_lo_ = samples.front().first;
    m.tab_hi_ = samples.back().first;
    m.normalization_ = 1.0;
    QuadratureConfig tight;
    tight.abs_tol = 1e-14;
    tight.rel_tol = 1e-12;
    const double raw = m.integrate([](double) { return 1.0; }, 0.0, m.tab_hi_, tight);
    if (!(raw > 0.0)) throw std::invalid_argument("tabulated: density has zero mass");
    m.normalization_ = 1.0 / raw;
    return m;
  }

  MeasureFamily family() const { return family_; }
  double alpha() const { return alpha_; }
  double gamma() const { return gamma_; }

  /// Right end of the support (inf for mu_alpha).
  double support_upper() const {
    switch (family_) {
      case MeasureFamily::MuAlpha:
        return std::numeric_limits<double>::infinity();
      case MeasureFamily::NuGamma:
      case MeasureFamily::LogSquare:
        return 1.0;
      case MeasureFamily::Tabulated:
        return tab_hi_;
    }
    return 1.0;
  }

  /// Density h(sigma); zero outside the family's support.
  double density(double sigma) const {
    if (!(sigma > 0.0)) throw std::domain_error("density: sigma must be positive");
    switch (family_) {
      case MeasureFamily::MuAlpha:
        return normalization_ * std::pow(sigma, alpha_) * std::exp(-2.0 * sigma);
      case MeasureFamily::NuGamma: {
        if (sigma > 1.0) return 0.0;
        // h = c * exp(-sigma^(1-gamma)) * ((gamma-1) sigma^(-2 gamma) - sigma^(-(gamma+1)))
        // evaluated in log space; the exponential factor underflows below
        // sigma ~ (log DBL_MAX)^(1/(1-gamma)) and the density is then 0.
        const double bracket = (gamma_ - 1.0) - std::pow(sigma, gamma_ - 1.0);
        if (bracket <= 0.0) return 0.0;  // formula clamped at 0 to keep h >= 0
        const double lh = -std::pow(sigma, 1.0 - gamma_) - 2.0 * gamma_ * std::log(sigma) +
                          std::log(bracket);
        if (lh < -745.0) return 0.0;
        return normalization_ * std::exp(lh);
      }
      case MeasureFamily::LogSquare: {
        if (sigma > 1.0) return 0.0;
        const double l = 1.0 - std::log(sigma);
        return 1.0 / (sigma * l * l);
      }
      case MeasureFamily::Tabulated: {
        if (sigma < tab_lo_ || sigma > tab_hi_) return 0.0;
        return normalization_ * std::max(0.0, interp_(std::log(sigma)));
      }
    }
    return 0.0;
  }

  /// Integral of F against the measure over [lo, hi] (intersected with the
  /// support).  Each family gets the change of variables that makes the
  /// adaptive rule converge: log_square is pushed forward exactly onto
  /// Lebesgue measure on (0,1], mu_alpha seeds graded panels at 0.
  template <typename F>
  double integrate(F&& f, double lo, double hi, const QuadratureConfig& cfg) const {
    lo = std::max(lo, 0.0);
    switch (family_) {
      case MeasureFamily::MuAlpha: {
        if (hi <= lo) return 0.0;
        auto integrand = [&](double s) { return f(s) * density_unchecked(s); };
        std::vector<double> bp = breakpoints_with_grading(lo, hi);
        auto res = integrate_adaptive_seeded<double>(integrand, bp, cfg);
        check(res, "mu_alpha integral");
        return res.value;
      }
      case MeasureFamily::LogSquare: {
        hi = std::min(hi, 1.0);
        if (hi <= lo) return 0.0;
        // v = 1/log(e/sigma) maps the measure to Lebesgue dv on (0,1].
        auto v_of = [](double s) { return s <= 0.0 ? 0.0 : 1.0 / (1.0 - std::log(s)); };
        auto sigma_of = [](double v) { return std::exp(1.0 - 1.0 / v); };
        auto integrand = [&](double v) { return v <= 0.0 ? 0.0 : f(sigma_of(v)); };
        auto res =
            integrate_adaptive_nothrow<double>(integrand, v_of(lo), v_of(hi), cfg);
        check(res, "log_square integral");
        return res.value;
      }
      case MeasureFamily::NuGamma: {
        hi = std::min(hi, 1.0);
        if (hi <= lo) return 0.0;
        auto integrand = [&](double s) {
          return s <= 0.0 ? 0.0 : f(s) * density_unchecked(s);
        };
        auto res = integrate_adaptive_nothrow<double>(integrand, lo, hi, cfg);
        check(res, "nu_gamma integral");
        return res.value;
      }
      case MeasureFamily::Tabulated: {
        lo = std::max(lo, tab_lo_);
        hi = std::min(hi, tab_hi_);
        if (hi <= lo) return 0.0;
        auto integrand = [&](double s) { return f(s) * density_unchecked(s); };
        std::vector<double> bp;
        bp.push_back(lo);
        for (double lx : interp_.knots()) {
          const double x = std::exp(lx);
          if (x > lo && x < hi) bp.push_back(x);
        }
        bp.push_back(hi);
        auto res = integrate_adaptive_seeded<double>(integrand, bp, cfg);
        check(res, "tabulated integral");
        return res.value;
      }
    }
    return 0.0;
  }

  /// Truncation point beyond which the tail of h(s)*exp(-decay*s) is
  /// negligible.  Finite-support families cut at the support edge.
  double cutoff(double extra_decay, const QuadratureConfig& cfg) const {
    if (cfg.upper_cutoff > 0.0) return cfg.upper_cutoff;
    const double su = support_upper();
    if (std::isfinite(su)) return su;
    const double rate = 2.0 + extra_decay;
    const double t = (70.0 + 8.0 * std::max(alpha_, 0.0)) / rate;
    return std::max(t, 1.0);
  }

  std::string cache_key() const {
    std::ostringstream os;
    os.precision(17);
    switch (family_) {
      case MeasureFamily::MuAlpha:
        os << "mu_alpha_a" << alpha_;
        break;
      case MeasureFamily::NuGamma:
        os << "nu_gamma_g" << gamma_;
        break;
      case MeasureFamily::LogSquare:
        os << "log_square";
        break;
      case MeasureFamily::Tabulated:
        os << "tabulated_" << tab_lo_ << "_" << tab_hi_ << "_" << interp_.knots().size();
        break;
    }
    return os.str();
  }

 private:
  AdmissibleMeasure() = default;

  double density_unchecked(double sigma) const {
    return sigma > 0.0 ? density(sigma) : 0.0;
  }

  std::vector<double> breakpoints_with_grading(double lo, double hi) const {
    // sigma^alpha is integrable-singular at 0 for alpha < 0; graded panels
    // keep the bisection depth bounded.
    if (lo == 0.0) {
      const double knee = std::min(hi, 1.0);
      std::vector<double> bp = graded_breakpoints(0.0, knee, 32, 0.25);
      int chunks = 8;
      for (int i = 1; i <= chunks; ++i) {
        double x = knee + (hi - knee) * i / chunks;
        if (x > bp.back()) bp.push_back(x);
      }
      return bp;
    }
    std::vector<double> bp;
    const int chunks = 8;
    for (int i = 0; i <= chunks; ++i) bp.push_back(lo + (hi - lo) * i / chunks);
    return bp;
  }

  template <typename R>
  static void check(const R& res, const char* what) {
    if (!res.converged) {
      throw NumericalError(std::string(what) + " did not converge: error estimate " +
                           std::to_string(res.error_estimate) + " after " +
                           std::to_string(res.subdivisions) + " subdivisions");
    }
  }

  MeasureFamily family_ = MeasureFamily::MuAlpha;
  double alpha_ = 0.0;
  double gamma_ = 2.0;
  double normalization_ = 1.0;
  detail::MonotoneCubic interp_;
  double tab_lo_ = 0.0, tab_hi_ = 0.0;
};

/// h(sigma); zero outside the support.  Domain error for sigma <= 0.
inline double density(const AdmissibleMeasure& mu, double sigma) {
  return mu.density(sigma);
}

/// mu([0, t]) by quadrature of the density.
inline double measure_of_interval(const AdmissibleMeasure& mu, double t,
                                  const QuadratureConfig& cfg = {}) {
  if (t < 0.0) throw std::domain_error("measure_of_interval: t must be >= 0");
  if (t == 0.0) return 0.0;
  const double hi = std::min(t, mu.cutoff(0.0, cfg));
  return mu.integrate([](double) { return 1.0; }, 0.0, hi, cfg);
}

/// beta_mu(sigma) = integral of (sigma - u) dmu(u) over [0, sigma].
inline double beta_mu(const AdmissibleMeasure& mu, double sigma,
                      const QuadratureConfig& cfg = {}) {
  if (!(sigma > 0.0)) throw std::domain_error("beta_mu: sigma must be positive");
  return mu.integrate([sigma](double u) { return sigma - u; }, 0.0, sigma, cfg);
}

/// omega(sigma) = sqrt(beta_mu(sigma) / h(sigma)) on (0, 1].
inline double omega(const AdmissibleMeasure& mu, double sigma,
                    const QuadratureConfig& cfg = {}) {
  if (!(sigma > 0.0) || sigma > 1.0)
    throw std::domain_error("omega: sigma must lie in (0, 1]");
  const double h = mu.density(sigma);
  if (!(h > 0.0))
    throw std::domain_error("omega: density vanishes at sigma = " + std::to_string(sigma));
  return std::sqrt(beta_mu(mu, sigma, cfg) / h);
}

/// Bergman weight w_n = integral of n^(-2 sigma) dmu(sigma).
inline double bergman_weight(const AdmissibleMeasure& mu, std::uint64_t n,
                             const QuadratureConfig& cfg = {}) {
  if (n < 1) throw std::domain_error("bergman_weight: n must be >= 1");
  if (n == 1) return 1.0;  // integrand is identically 1 against a probability measure
  const double two_log_n = 2.0 * std::log(static_cast<double>(n));
  const double hi = mu.cutoff(two_log_n, cfg);
  return mu.integrate([two_log_n](double s) { return std::exp(-two_log_n * s); }, 0.0,
                      hi, cfg);
}

}  // namespace dvlab
