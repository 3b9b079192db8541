#pragma once

#include <complex>
#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include "dvlab/dirichlet_series.hpp"
#include "dvlab/primes.hpp"

namespace dvlab {

/// Point of the polytorus: unit-modulus values at the first P primes,
/// extended to all smooth integers by complete multiplicativity.
class Character {
 public:
  explicit Character(std::vector<Complex> prime_values)
      : prime_values_(std::move(prime_values)) {
    for (const auto& v : prime_values_) {
      if (std::abs(std::abs(v) - 1.0) > 1e-12)
        throw std::invalid_argument("Character: prime values must have modulus 1");
    }
  }

  static Character trivial(std::size_t p_count) {
    return Character(std::vector<Complex>(p_count, Complex(1.0)));
  }

  static Character random(std::size_t p_count, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> angle(0.0, 2.0 * M_PI);
    std::vector<Complex> vals;
    vals.reserve(p_count);
    for (std::size_t i = 0; i < p_count; ++i) {
      const double a = angle(rng);
      vals.emplace_back(std::cos(a), std::sin(a));
    }
    return Character(std::move(vals));
  }

  std::size_t prime_count() const { return prime_values_.size(); }
  Complex prime_value(std::size_t j) const { return prime_values_.at(j); }

  /// chi(n) = product over the factorization; throws when n needs a prime
  /// beyond the stored values.
  Complex operator()(std::uint64_t n) const {
    auto primes = first_primes(prime_values_.size());
    Complex v(1.0);
    for (const auto& [p, e] : factorize_u64(n)) {
      std::size_t idx = prime_values_.size();
      for (std::size_t j = 0; j < primes.size(); ++j) {
        if (primes[j] == p) {
          idx = j;
          break;
        }
      }
      if (idx == prime_values_.size()) {
        throw std::domain_error("character of length " +
                                std::to_string(prime_values_.size()) +
                                " does not cover prime " + std::to_string(p));
      }
      Complex pw(1.0);
      for (std::uint32_t k = 0; k < e; ++k) pw *= prime_values_[idx];
      v *= pw;
    }
    return v;
  }

 private:
  std::vector<Complex> prime_values_;
};

/// f_chi: a_n -> a_n chi(n).  Requires the character to cover every prime up
/// to the truncation, i.e. p_{P+1} > N.
inline DirichletSeries twist(const DirichletSeries& f, const Character& chi) {
  const auto primes = first_primes(chi.prime_count() + 1);
  if (primes.back() <= f.truncation()) {
    throw std::domain_error("twist: insufficient character length, prime " +
                            std::to_string(primes.back()) + " <= truncation " +
                            std::to_string(f.truncation()));
  }
  std::vector<std::pair<std::uint64_t, Complex>> terms;
  f.for_each([&](std::uint64_t n, Complex a) { terms.emplace_back(n, a * chi(n)); });
  return DirichletSeries::from_terms(f.truncation(), std::move(terms));
}

}  // namespace dvlab
