#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "dvlab/dirichlet_series.hpp"
#include "dvlab/primes.hpp"
#include "dvlab/random.hpp"

namespace dvlab {

/// Partial sums of zeta: a_n = 1 up to the truncation.
inline DirichletSeries zeta_truncation(std::uint64_t n) {
  std::vector<Complex> c(static_cast<std::size_t>(n), Complex(1.0));
  return DirichletSeries::from_coefficients(std::move(c));
}

/// Test family with derivative blowing up like sigma^(-gamma) at the right
/// edge of convergence: a_n = -(log n)^(gamma-2) / n for n >= 2.
inline DirichletSeries f_gamma_series(double gamma, std::uint64_t n) {
  std::vector<std::pair<std::uint64_t, Complex>> terms;
  terms.reserve(static_cast<std::size_t>(n));
  for (std::uint64_t k = 2; k <= n; ++k) {
    const double lk = std::log(static_cast<double>(k));
    terms.emplace_back(k, Complex(-std::pow(lk, gamma - 2.0) / static_cast<double>(k)));
  }
  return DirichletSeries::from_terms(n, std::move(terms));
}

/// One prime per doubling-log block [2^(2^j), 2^(2^(j+1))]; unit
/// coefficients.  Blocks stop at `index_cap` (default 2^32).
inline DirichletSeries lacunary_prime_symbol(int j_max,
                                             std::uint64_t index_cap = (std::uint64_t(1) << 32)) {
  std::vector<std::pair<std::uint64_t, Complex>> terms;
  for (int j = 1; j <= j_max && j < 6; ++j) {  // 2^(2^6) would overflow 64 bits
    const std::uint64_t x_j = std::uint64_t(1) << (std::uint64_t(1) << j);
    if (x_j > index_cap) break;
    // smallest prime >= x_j (gaps here are tiny)
    std::uint64_t p = x_j;
    while (true) {
      auto f = factorize_u64(p);
      if (f.size() == 1 && f[0].second == 1) break;
      ++p;
    }
    if (p > index_cap) break;
    terms.emplace_back(p, Complex(1.0));
  }
  return DirichletSeries::from_terms(index_cap, std::move(terms));
}

/// The evaluation-functional witness sum_{n>=2} n^(-s)/(n log n) as a
/// materialized series (use bloch_delta_witness_value for huge truncations).
inline DirichletSeries delta_witness_series(std::uint64_t n) {
  std::vector<std::pair<std::uint64_t, Complex>> terms;
  for (std::uint64_t k = 2; k <= n; ++k) {
    const double lk = std::log(static_cast<double>(k));
    terms.emplace_back(k, Complex(1.0 / (static_cast<double>(k) * lk)));
  }
  return DirichletSeries::from_terms(n, std::move(terms));
}

/// Random d-smooth Dirichlet polynomial with indices <= n_max and
/// coefficients in the unit square, for randomized cross-checks.
inline DirichletSeries random_smooth_series(int d, std::uint64_t n_max,
                                            std::size_t max_terms, Rng& rng,
                                            bool real_nonnegative = false) {
  std::vector<std::uint64_t> smooth;
  for (std::uint64_t n = 1; n <= n_max; ++n) {
    if (is_smooth(n, d)) smooth.push_back(n);
  }
  std::vector<std::pair<std::uint64_t, Complex>> terms;
  for (std::uint64_t n : smooth) {
    if (terms.size() >= max_terms) break;
    if (rng.uniform() < 0.75) {
      Complex c = real_nonnegative
                      ? Complex(rng.uniform())
                      : Complex(rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0));
      terms.emplace_back(n, c);
    }
  }
  if (terms.empty()) terms.emplace_back(smooth.front(), Complex(1.0));
  return DirichletSeries::from_terms(n_max, std::move(terms));
}

/// Random dense polynomial of the given truncation (not necessarily smooth).
inline DirichletSeries random_series(std::uint64_t n, std::size_t terms_wanted, Rng& rng) {
  std::vector<std::pair<std::uint64_t, Complex>> terms;
  std::vector<bool> used(static_cast<std::size_t>(n) + 1, false);
  while (terms.size() < std::min<std::size_t>(terms_wanted, static_cast<std::size_t>(n))) {
    const std::uint64_t idx = rng.integer(1, n);
    if (used[static_cast<std::size_t>(idx)]) continue;
    used[static_cast<std::size_t>(idx)] = true;
    terms.emplace_back(idx, Complex(rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0)));
  }
  return DirichletSeries::from_terms(n, std::move(terms));
}

}  // namespace dvlab
