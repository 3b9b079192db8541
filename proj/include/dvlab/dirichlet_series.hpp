#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "dvlab/quadrature.hpp"

namespace dvlab {

using Complex = std::complex<double>;

/// Truncated Dirichlet series: coefficients a_1..a_N of sum a_n n^(-s).
/// Coefficients are stored dense for desk-scale truncations and switch to a
/// sorted sparse list when the index range is huge or the fill is below 1%
/// (the lacunary examples have a handful of terms below 2^32).
class DirichletSeries {
 public:
  static constexpr std::uint64_t kDenseLimit = std::uint64_t(1) << 23;
  static constexpr double kSparseDensity = 0.01;

  DirichletSeries() : truncation_(1), dense_(1, Complex(0.0)) {}

  static DirichletSeries zero(std::uint64_t n) {
    check_truncation(n);
    DirichletSeries f;
    f.truncation_ = n;
    if (n <= kDenseLimit) {
      f.dense_.assign(static_cast<std::size_t>(n), Complex(0.0));
    } else {
      f.dense_.clear();
      f.sparse_mode_ = true;
    }
    return f;
  }

  static DirichletSeries constant(Complex c) {
    DirichletSeries f;
    f.dense_[0] = c;
    return f;
  }

  static DirichletSeries monomial(std::uint64_t n, Complex c = Complex(1.0)) {
    check_truncation(n);
    return from_terms(n, {{n, c}});
  }

  static DirichletSeries from_coefficients(std::vector<Complex> coeffs) {
    if (coeffs.empty()) coeffs.assign(1, Complex(0.0));
    DirichletSeries f;
    f.truncation_ = coeffs.size();
    f.dense_ = std::move(coeffs);
    return f;
  }

  static DirichletSeries from_terms(std::uint64_t truncation,
                                    std::vector<std::pair<std::uint64_t, Complex>> terms) {
    check_truncation(truncation);
    std::sort(terms.begin(), terms.end(),
              [](const auto& a, const auto& b) { return a.first < b.first; });
    for (std::size_t i = 0; i < terms.size(); ++i) {
      if (terms[i].first < 1 || terms[i].first > truncation)
        throw std::out_of_range("DirichletSeries: term index outside 1..N");
      if (i > 0 && terms[i].first == terms[i - 1].first)
        throw std::invalid_argument("DirichletSeries: duplicate term index");
    }
    DirichletSeries f;
    f.truncation_ = truncation;
    const bool dense = truncation <= kDenseLimit &&
                       (truncation <= 4096 ||
                        static_cast<double>(terms.size()) >=
                            kSparseDensity * static_cast<double>(truncation));
    if (dense) {
      f.dense_.assign(static_cast<std::size_t>(truncation), Complex(0.0));
      for (const auto& [n, c] : terms) f.dense_[static_cast<std::size_t>(n - 1)] = c;
    } else {
      f.sparse_mode_ = true;
      f.dense_.clear();
      f.sparse_ = std::move(terms);
      std::erase_if(f.sparse_, [](const auto& t) { return t.second == Complex(0.0); });
    }
    return f;
  }

  std::uint64_t truncation() const { return truncation_; }
  bool is_sparse() const { return sparse_mode_; }

  std::size_t nonzero_count() const {
    if (sparse_mode_) return sparse_.size();
    std::size_t k = 0;
    for (const auto& c : dense_)
      if (c != Complex(0.0)) ++k;
    return k;
  }

  Complex coefficient(std::uint64_t n) const {
    if (n < 1 || n > truncation_) return Complex(0.0);
    if (!sparse_mode_) return dense_[static_cast<std::size_t>(n - 1)];
    auto it = std::lower_bound(sparse_.begin(), sparse_.end(), n,
                               [](const auto& t, std::uint64_t v) { return t.first < v; });
    return (it != sparse_.end() && it->first == n) ? it->second : Complex(0.0);
  }

  /// Visit nonzero (n, a_n) in ascending n.
  template <typename F>
  void for_each(F&& f) const {
    if (sparse_mode_) {
      for (const auto& [n, c] : sparse_) f(n, c);
    } else {
      for (std::size_t i = 0; i < dense_.size(); ++i) {
        if (dense_[i] != Complex(0.0)) f(static_cast<std::uint64_t>(i + 1), dense_[i]);
      }
    }
  }

  std::vector<std::pair<std::uint64_t, Complex>> terms() const {
    std::vector<std::pair<std::uint64_t, Complex>> out;
    for_each([&](std::uint64_t n, Complex c) { out.emplace_back(n, c); });
    return out;
  }

  /// All coefficients real with one common sign (the t = 0 fast path for
  /// strip suprema applies to these and their negatives alike).
  bool has_aligned_real_coefficients() const {
    int sign = 0;
    bool ok = true;
    for_each([&](std::uint64_t, Complex c) {
      if (c.imag() != 0.0) {
        ok = false;
        return;
      }
      const int s = c.real() > 0 ? 1 : (c.real() < 0 ? -1 : 0);
      if (s == 0) return;
      if (sign == 0)
        sign = s;
      else if (sign != s)
        ok = false;
    });
    return ok;
  }

  double max_abs_coefficient() const {
    double m = 0.0;
    for_each([&](std::uint64_t, Complex c) { m = std::max(m, std::abs(c)); });
    return m;
  }

 private:
  static void check_truncation(std::uint64_t n) {
    if (n < 1) throw std::invalid_argument("DirichletSeries: truncation must be >= 1");
  }

  std::uint64_t truncation_;
  std::vector<Complex> dense_;
  std::vector<std::pair<std::uint64_t, Complex>> sparse_;
  bool sparse_mode_ = false;
};

inline DirichletSeries add(const DirichletSeries& f, const DirichletSeries& g) {
  const std::uint64_t n = std::max(f.truncation(), g.truncation());
  std::vector<std::pair<std::uint64_t, Complex>> terms;
  f.for_each([&](std::uint64_t k, Complex c) { terms.emplace_back(k, c); });
  g.for_each([&](std::uint64_t k, Complex c) { terms.emplace_back(k, c); });
  std::sort(terms.begin(), terms.end(),
            [](const auto& a, const auto& b) { return a.first < b.first; });
  std::vector<std::pair<std::uint64_t, Complex>> merged;
  for (const auto& t : terms) {
    if (!merged.empty() && merged.back().first == t.first)
      merged.back().second += t.second;
    else
      merged.push_back(t);
  }
  return DirichletSeries::from_terms(n, std::move(merged));
}

inline DirichletSeries scale(const DirichletSeries& f, Complex c) {
  std::vector<std::pair<std::uint64_t, Complex>> terms;
  f.for_each([&](std::uint64_t k, Complex a) { terms.emplace_back(k, c * a); });
  return DirichletSeries::from_terms(f.truncation(), std::move(terms));
}

/// Dirichlet convolution truncated at N_out: c_k = sum over mn = k of a_m b_n.
inline DirichletSeries multiply(const DirichletSeries& f, const DirichletSeries& g,
                                std::uint64_t n_out) {
  if (n_out < 1) throw std::invalid_argument("multiply: N_out must be >= 1");
  if (!f.is_sparse() && !g.is_sparse() && n_out <= DirichletSeries::kDenseLimit) {
    std::vector<Complex> c(static_cast<std::size_t>(n_out), Complex(0.0));
    const std::uint64_t mf = std::min(f.truncation(), n_out);
    for (std::uint64_t m = 1; m <= mf; ++m) {
      const Complex am = f.coefficient(m);
      if (am == Complex(0.0)) continue;
      const std::uint64_t ng = std::min(g.truncation(), n_out / m);
      for (std::uint64_t n = 1; n <= ng; ++n) {
        const Complex bn = g.coefficient(n);
        if (bn == Complex(0.0)) continue;
        c[static_cast<std::size_t>(m * n - 1)] += am * bn;
      }
    }
    return DirichletSeries::from_coefficients(std::move(c));
  }
  std::vector<std::pair<std::uint64_t, Complex>> terms;
  f.for_each([&](std::uint64_t m, Complex am) {
    g.for_each([&](std::uint64_t n, Complex bn) {
      if (m <= n_out / n) terms.emplace_back(m * n, am * bn);
    });
  });
  std::sort(terms.begin(), terms.end(),
            [](const auto& a, const auto& b) { return a.first < b.first; });
  std::vector<std::pair<std::uint64_t, Complex>> merged;
  for (const auto& t : terms) {
    if (!merged.empty() && merged.back().first == t.first)
      merged.back().second += t.second;
    else
      merged.push_back(t);
  }
  return DirichletSeries::from_terms(n_out, std::move(merged));
}

/// f_sigma(s) = f(s + sigma): a_n -> a_n n^(-sigma).  Left translates leave
/// the spaces, hence the domain restriction.
inline DirichletSeries translate(const DirichletSeries& f, double sigma) {
  if (sigma < 0.0) throw std::domain_error("translate: sigma must be >= 0");
  std::vector<std::pair<std::uint64_t, Complex>> terms;
  f.for_each([&](std::uint64_t n, Complex a) {
    terms.emplace_back(n, a * std::exp(-sigma * std::log(static_cast<double>(n))));
  });
  return DirichletSeries::from_terms(f.truncation(), std::move(terms));
}

/// Derivative: a_n -> -a_n log n.
inline DirichletSeries derivative(const DirichletSeries& f) {
  std::vector<std::pair<std::uint64_t, Complex>> terms;
  f.for_each([&](std::uint64_t n, Complex a) {
    if (n > 1) terms.emplace_back(n, -a * std::log(static_cast<double>(n)));
  });
  return DirichletSeries::from_terms(f.truncation(), std::move(terms));
}

struct EvaluationResult {
  Complex value;
  double tail_bound;  // bound on |sum_{n > N} a_n n^(-s)| under |a_n| <= C n^delta
};

/// Partial sum at s plus a tail-bound estimate for the discarded terms,
/// assuming polynomial coefficient growth |a_n| <= C n^delta (defaults:
/// C = max |a_n|, delta = 0).
inline EvaluationResult evaluate(const DirichletSeries& f, Complex s,
                                 double growth_c = -1.0, double growth_delta = 0.0) {
  KahanSum<double> re, im;
  f.for_each([&](std::uint64_t n, Complex a) {
    const Complex term = a * std::exp(-s * std::log(static_cast<double>(n)));
    re.add(term.real());
    im.add(term.imag());
  });
  if (growth_c < 0.0) growth_c = f.max_abs_coefficient();
  const double sigma = s.real();
  const double n_dbl = static_cast<double>(f.truncation());
  double tail;
  if (sigma > growth_delta + 1.0) {
    tail = growth_c * std::pow(n_dbl, growth_delta + 1.0 - sigma) /
           (sigma - growth_delta - 1.0);
  } else {
    tail = std::numeric_limits<double>::infinity();
  }
  return {Complex(re.value(), im.value()), tail};
}

}  // namespace dvlab
