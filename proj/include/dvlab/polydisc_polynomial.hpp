#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <map>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "dvlab/dirichlet_series.hpp"
#include "dvlab/primes.hpp"

namespace dvlab {

/// Polynomial on the d-dimensional polydisc: finitely many multi-indexed
/// terms.  The Bohr lift of a smooth Dirichlet polynomial lands here.
class PolydiscPolynomial {
 public:
  using Index = std::vector<std::uint32_t>;

  explicit PolydiscPolynomial(int dimension) : dimension_(dimension) {
    if (dimension < 1) throw std::invalid_argument("PolydiscPolynomial: dimension >= 1");
  }

  int dimension() const { return dimension_; }
  std::size_t term_count() const { return terms_.size(); }
  const std::map<Index, Complex>& terms() const { return terms_; }

  void add_term(const Index& idx, Complex c) {
    if (static_cast<int>(idx.size()) != dimension_)
      throw std::invalid_argument("PolydiscPolynomial: index arity mismatch");
    auto [it, inserted] = terms_.try_emplace(idx, c);
    if (!inserted) it->second += c;
    if (it->second == Complex(0.0)) terms_.erase(it);
  }

  Complex coefficient(const Index& idx) const {
    auto it = terms_.find(idx);
    return it == terms_.end() ? Complex(0.0) : it->second;
  }

  Complex constant_term() const { return coefficient(Index(dimension_, 0)); }

  std::uint32_t degree(int coord) const {
    std::uint32_t d = 0;
    for (const auto& [idx, c] : terms_) d = std::max(d, idx[static_cast<std::size_t>(coord)]);
    return d;
  }

  Complex evaluate(std::span<const Complex> z) const {
    if (static_cast<int>(z.size()) != dimension_)
      throw std::invalid_argument("PolydiscPolynomial::evaluate: arity mismatch");
    Complex sum(0.0);
    for (const auto& [idx, c] : terms_) {
      Complex m = c;
      for (int j = 0; j < dimension_; ++j) {
        Complex p(1.0);
        for (std::uint32_t k = 0; k < idx[static_cast<std::size_t>(j)]; ++k)
          p *= z[static_cast<std::size_t>(j)];
        m *= p;
      }
      sum += m;
    }
    return sum;
  }

  /// d/dz_j.
  PolydiscPolynomial partial_derivative(int coord) const {
    PolydiscPolynomial out(dimension_);
    for (const auto& [idx, c] : terms_) {
      const std::uint32_t a = idx[static_cast<std::size_t>(coord)];
      if (a == 0) continue;
      Index shifted = idx;
      shifted[static_cast<std::size_t>(coord)] = a - 1;
      out.add_term(shifted, c * static_cast<double>(a));
    }
    return out;
  }

 private:
  int dimension_;
  std::map<Index, Complex> terms_;
};

inline PolydiscPolynomial operator+(const PolydiscPolynomial& a,
                                    const PolydiscPolynomial& b) {
  PolydiscPolynomial out = a;
  for (const auto& [idx, c] : b.terms()) out.add_term(idx, c);
  return out;
}

inline PolydiscPolynomial operator-(const PolydiscPolynomial& a,
                                    const PolydiscPolynomial& b) {
  PolydiscPolynomial out = a;
  for (const auto& [idx, c] : b.terms()) out.add_term(idx, -c);
  return out;
}

inline PolydiscPolynomial operator*(const PolydiscPolynomial& a,
                                    const PolydiscPolynomial& b) {
  if (a.dimension() != b.dimension())
    throw std::invalid_argument("polydisc multiply: dimension mismatch");
  PolydiscPolynomial out(a.dimension());
  for (const auto& [ia, ca] : a.terms()) {
    for (const auto& [ib, cb] : b.terms()) {
      PolydiscPolynomial::Index idx(ia.size());
      for (std::size_t j = 0; j < ia.size(); ++j) idx[j] = ia[j] + ib[j];
      out.add_term(idx, ca * cb);
    }
  }
  return out;
}

inline PolydiscPolynomial operator*(Complex c, const PolydiscPolynomial& a) {
  PolydiscPolynomial out(a.dimension());
  for (const auto& [idx, v] : a.terms()) out.add_term(idx, c * v);
  return out;
}

inline PolydiscPolynomial power(const PolydiscPolynomial& a, int n) {
  if (n < 0) throw std::invalid_argument("power: exponent must be >= 0");
  PolydiscPolynomial out(a.dimension());
  out.add_term(PolydiscPolynomial::Index(a.dimension(), 0), Complex(1.0));
  for (int i = 0; i < n; ++i) out = out * a;
  return out;
}

/// Bohr lift: z_j stands for p_j^(-s), so the coefficient of n = prod p_j^e_j
/// lands at multi-index (e_1..e_d).  Indices with a factor beyond the first d
/// primes are rejected, listing the offenders.
inline PolydiscPolynomial bohr_lift(const DirichletSeries& f, int d) {
  PolydiscPolynomial out(d);
  std::vector<std::uint64_t> offenders;
  f.for_each([&](std::uint64_t n, Complex c) {
    try {
      out.add_term(prime_exponents(n, d), c);
    } catch (const std::domain_error&) {
      offenders.push_back(n);
    }
  });
  if (!offenders.empty()) {
    std::string msg = "bohr_lift: coefficients at non-smooth indices:";
    for (std::size_t i = 0; i < offenders.size() && i < 8; ++i)
      msg += " " + std::to_string(offenders[i]);
    if (offenders.size() > 8) msg += " ...";
    throw std::domain_error(msg);
  }
  return out;
}

/// Inverse lift: the term at (e_1..e_d) becomes the coefficient of
/// n = prod p_j^e_j.
inline DirichletSeries inverse_bohr_lift(const PolydiscPolynomial& p) {
  const auto primes = first_primes(static_cast<std::size_t>(p.dimension()));
  std::vector<std::pair<std::uint64_t, Complex>> terms;
  std::uint64_t max_n = 1;
  for (const auto& [idx, c] : p.terms()) {
    std::uint64_t n = 1;
    for (std::size_t j = 0; j < idx.size(); ++j) {
      for (std::uint32_t k = 0; k < idx[j]; ++k) {
        if (n > std::numeric_limits<std::uint64_t>::max() / primes[j])
          throw std::overflow_error("inverse_bohr_lift: index overflows 64 bits");
        n *= primes[j];
      }
    }
    terms.emplace_back(n, c);
    max_n = std::max(max_n, n);
  }
  return DirichletSeries::from_terms(max_n, std::move(terms));
}

}  // namespace dvlab
