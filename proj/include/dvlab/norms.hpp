#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "dvlab/dirichlet_series.hpp"
#include "dvlab/measure.hpp"
#include "dvlab/primes.hpp"
#include "dvlab/random.hpp"
#include "dvlab/weight_table.hpp"

namespace dvlab {

/// Coefficient l2 norm: sqrt(sum |a_n|^2).
inline double h2_norm(const DirichletSeries& f) {
  KahanSum<double> s;
  f.for_each([&](std::uint64_t, Complex a) { s.add(std::norm(a)); });
  return std::sqrt(s.value());
}

/// Weighted coefficient norm sqrt(sum |a_n|^2 w_n).  Dense series pull the
/// weight table from the shared store; sparse series compute per-index
/// weights (their indices can exceed any sensible table).
inline double a2mu_norm(const DirichletSeries& f, const AdmissibleMeasure& mu,
                        const QuadratureConfig& cfg = {}) {
  KahanSum<double> s;
  if (!f.is_sparse()) {
    auto w = WeightTableStore::instance().get(mu, f.truncation(), cfg);
    f.for_each([&](std::uint64_t n, Complex a) {
      s.add(std::norm(a) * (*w)[static_cast<std::size_t>(n - 1)]);
    });
  } else {
    f.for_each([&](std::uint64_t n, Complex a) {
      s.add(std::norm(a) * bergman_weight(mu, n, cfg));
    });
  }
  return std::sqrt(s.value());
}

/// Same norm through the translation integral: the square of the norm equals
/// the integral over sigma of |f_sigma|_{H2}^2 against the measure.  Serves
/// as the independent cross-route for a2mu_norm.
inline double a2mu_norm_integral(const DirichletSeries& f, const AdmissibleMeasure& mu,
                                 const QuadratureConfig& cfg = {}) {
  const auto terms = f.terms();
  double min_decay = std::numeric_limits<double>::infinity();
  for (const auto& [n, a] : terms) {
    if (n >= 2) min_decay = std::min(min_decay, 2.0 * std::log(static_cast<double>(n)));
  }
  auto h2_sq_translated = [&terms](double sigma) {
    KahanSum<double> s;
    for (const auto& [n, a] : terms) {
      s.add(std::norm(a) * std::exp(-2.0 * sigma * std::log(static_cast<double>(n))));
    }
    return s.value();
  };
  const double hi =
      mu.cutoff(std::isfinite(min_decay) ? min_decay : 0.0, cfg);
  const double sq = mu.integrate(h2_sq_translated, 0.0, hi, cfg);
  return std::sqrt(std::max(0.0, sq));
}

enum class TorusSampler { MonteCarlo, Lattice };

struct McEstimate {
  double estimate = 0.0;
  double std_error = 0.0;
  std::uint64_t samples = 0;
};

namespace detail {

/// Fibonacci-style rank-1 lattice generating vector for the unit cube.
inline std::vector<double> lattice_point(std::uint64_t i, std::uint64_t n, int d,
                                         const std::vector<double>& shift) {
  // Korobov vector z_j = a^j mod n with a fixed multiplier; adequate at desk
  // dimensions as a variance-reduction option.
  static constexpr std::uint64_t kMultiplier = 76540321;
  std::vector<double> x(static_cast<std::size_t>(d));
  std::uint64_t zj = 1;
  for (int j = 0; j < d; ++j) {
    zj = (zj * kMultiplier) % n;
    double v = static_cast<double>((i * zj) % n) / static_cast<double>(n) +
               shift[static_cast<std::size_t>(j)];
    x[static_cast<std::size_t>(j)] = v - std::floor(v);
  }
  return x;
}

}  // namespace detail

/// Monte-Carlo (or randomly shifted lattice) estimate of the H^p norm of a
/// d-smooth series: (integral over T^d of |Bf|^p)^(1/p) with the standard
/// error of the final estimate.
inline McEstimate hp_norm_mc(const DirichletSeries& f, double p, int d,
                             std::uint64_t n_samples, std::uint64_t seed,
                             TorusSampler sampler = TorusSampler::MonteCarlo) {
  if (!(p >= 1.0)) throw std::invalid_argument("hp_norm_mc: requires p >= 1");
  if (n_samples < 2) throw std::invalid_argument("hp_norm_mc: need >= 2 samples");
  struct Term {
    std::vector<std::uint32_t> alpha;
    Complex coeff;
  };
  std::vector<Term> terms;
  f.for_each([&](std::uint64_t n, Complex a) {
    terms.push_back({prime_exponents(n, d), a});  // throws if not d-smooth
  });

  Rng rng(seed);
  std::vector<double> shift(static_cast<std::size_t>(d), 0.0);
  if (sampler == TorusSampler::Lattice) {
    for (auto& s : shift) s = rng.uniform();
  }

  auto sample_value = [&](std::uint64_t i) {
    std::vector<double> theta(static_cast<std::size_t>(d));
    if (sampler == TorusSampler::MonteCarlo) {
      for (auto& t : theta) t = rng.uniform();
    } else {
      theta = detail::lattice_point(i, n_samples, d, shift);
    }
    Complex value(0.0);
    for (const auto& term : terms) {
      double phase = 0.0;
      for (int j = 0; j < d; ++j)
        phase += 2.0 * M_PI * theta[static_cast<std::size_t>(j)] *
                 term.alpha[static_cast<std::size_t>(j)];
      value += term.coeff * Complex(std::cos(phase), std::sin(phase));
    }
    return std::pow(std::abs(value), p);
  };

  KahanSum<double> sum, sum_sq;
  for (std::uint64_t i = 0; i < n_samples; ++i) {
    const double v = sample_value(i);
    sum.add(v);
    sum_sq.add(v * v);
  }
  const double mean = sum.value() / static_cast<double>(n_samples);
  const double var = std::max(0.0, sum_sq.value() / static_cast<double>(n_samples) -
                                       mean * mean);
  const double se_mean = std::sqrt(var / static_cast<double>(n_samples));
  const double est = std::pow(mean, 1.0 / p);
  // Delta method: d(mean^(1/p))/dmean = mean^(1/p - 1)/p.
  const double se = mean > 0.0 ? se_mean * std::pow(mean, 1.0 / p - 1.0) / p : se_mean;
  return {est, se, n_samples};
}

}  // namespace dvlab
