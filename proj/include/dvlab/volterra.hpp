#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <memory>
#include <stdexcept>
#include <utility>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/SVD>

#include "dvlab/character.hpp"
#include "dvlab/dirichlet_series.hpp"
#include "dvlab/measure.hpp"
#include "dvlab/norms.hpp"
#include "dvlab/primes.hpp"
#include "dvlab/random.hpp"
#include "dvlab/weight_table.hpp"

namespace dvlab {

/// Coefficient action of the Volterra operator with symbol g on f:
/// c_1 = 0 and, for k >= 2,  c_k = (1/log k) sum_{mn=k, n>=2} a_m b_n log n.
inline DirichletSeries volterra_apply(const DirichletSeries& g, const DirichletSeries& f,
                                      std::uint64_t n_out) {
  if (n_out < 1) throw std::invalid_argument("volterra_apply: N_out must be >= 1");
  if (n_out > DirichletSeries::kDenseLimit)
    throw std::invalid_argument("volterra_apply: N_out exceeds dense limit");
  std::vector<Complex> acc(static_cast<std::size_t>(n_out), Complex(0.0));
  f.for_each([&](std::uint64_t m, Complex am) {
    if (m > n_out) return;
    g.for_each([&](std::uint64_t n, Complex bn) {
      if (n < 2 || n > n_out / m) return;
      acc[static_cast<std::size_t>(m * n - 1)] +=
          am * bn * std::log(static_cast<double>(n));
    });
  });
  for (std::uint64_t k = 2; k <= n_out; ++k) {
    acc[static_cast<std::size_t>(k - 1)] /= std::log(static_cast<double>(k));
  }
  if (!acc.empty()) acc[0] = Complex(0.0);
  return DirichletSeries::from_coefficients(std::move(acc));
}

/// Direct numeric evaluation of -int_s^inf f(w) g'(w) dw along the
/// horizontal ray.  The ray is truncated where the coefficient-sum tail
/// bound (product of coefficient sums times 2^(-x)) drops below tolerance.
inline Complex volterra_apply_quadrature(const DirichletSeries& g,
                                         const DirichletSeries& f, Complex s,
                                         const QuadratureConfig& cfg = {}) {
  if (!(s.real() >= 1.0))
    throw std::domain_error("volterra_apply_quadrature: requires Re s >= 1");
  const DirichletSeries gp = derivative(g);

  double f_const = std::abs(f.coefficient(1));
  double f_decaying = 0.0;
  f.for_each([&](std::uint64_t n, Complex a) {
    if (n >= 2) f_decaying += std::abs(a) * std::pow(static_cast<double>(n), -s.real());
  });
  double gp_sum = 0.0;
  gp.for_each([&](std::uint64_t n, Complex b) {
    gp_sum += std::abs(b) * std::pow(static_cast<double>(n), -s.real());
  });
  if (gp_sum == 0.0) return Complex(0.0);
  const double bound_scale = (f_const + f_decaying) * gp_sum;
  const double log2 = std::log(2.0);
  double x_max = cfg.upper_cutoff;
  if (x_max <= 0.0) {
    x_max = std::max(4.0, std::log(std::max(bound_scale, 1.0) /
                                   (cfg.abs_tol * log2)) / log2);
  }
  auto integrand = [&](double x) -> Complex {
    const Complex w = s + x;
    return evaluate(f, w).value * evaluate(gp, w).value;
  };
  auto res = integrate_adaptive_nothrow<Complex>(integrand, 0.0, x_max, cfg);
  if (!res.converged) {
    throw NumericalError("volterra_apply_quadrature did not converge, error estimate " +
                         std::to_string(res.error_estimate));
  }
  return -res.value;
}

/// Compression of T_g to the span of e~_1..e~_N, e~_n = n^(-s)/sqrt(w_n).
/// Entry (k, j) is b_{k/j} (log(k/j)/log k) sqrt(w_k/w_j) when j | k and
/// k/j >= 2; zero otherwise.  Stored column-sparse.
struct FiniteSectionMatrix {
  std::uint64_t n = 0;
  std::shared_ptr<const std::vector<double>> weights;  // w_1..w_n
  // columns[j-1]: (row k, value), rows ascending
  std::vector<std::vector<std::pair<std::uint32_t, Complex>>> columns;

  std::vector<Complex> apply(const std::vector<Complex>& x) const {
    std::vector<Complex> y(static_cast<std::size_t>(n), Complex(0.0));
    for (std::size_t j = 0; j < columns.size(); ++j) {
      const Complex xj = x[j];
      if (xj == Complex(0.0)) continue;
      for (const auto& [k, v] : columns[j]) y[k - 1] += v * xj;
    }
    return y;
  }

  std::vector<Complex> apply_adjoint(const std::vector<Complex>& x) const {
    std::vector<Complex> y(static_cast<std::size_t>(n), Complex(0.0));
    for (std::size_t j = 0; j < columns.size(); ++j) {
      Complex sum(0.0);
      for (const auto& [k, v] : columns[j]) sum += std::conj(v) * x[k - 1];
      y[j] = sum;
    }
    return y;
  }

  double frobenius_norm() const {
    KahanSum<double> s;
    for (const auto& col : columns)
      for (const auto& [k, v] : col) s.add(std::norm(v));
    return std::sqrt(s.value());
  }

  Eigen::MatrixXcd to_dense() const {
    Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(static_cast<Eigen::Index>(n),
                                                static_cast<Eigen::Index>(n));
    for (std::size_t j = 0; j < columns.size(); ++j)
      for (const auto& [k, v] : columns[j])
        m(static_cast<Eigen::Index>(k - 1), static_cast<Eigen::Index>(j)) = v;
    return m;
  }
};

inline FiniteSectionMatrix finite_section_matrix(const DirichletSeries& g,
                                                 const AdmissibleMeasure& mu,
                                                 std::uint64_t n,
                                                 const QuadratureConfig& cfg = {}) {
  if (n < 1 || n > (std::uint64_t(1) << 31))
    throw std::invalid_argument("finite_section_matrix: unsupported N");
  FiniteSectionMatrix m;
  m.n = n;
  m.weights = WeightTableStore::instance().get(mu, n, cfg);
  const auto& w = *m.weights;
  m.columns.assign(static_cast<std::size_t>(n), {});
  const std::int64_t cols = static_cast<std::int64_t>(n);
#pragma omp parallel for schedule(dynamic, 16)
  for (std::int64_t j = 1; j <= cols; ++j) {
    auto& col = m.columns[static_cast<std::size_t>(j - 1)];
    g.for_each([&](std::uint64_t q, Complex bq) {
      if (q < 2) return;
      const std::uint64_t k = q * static_cast<std::uint64_t>(j);
      if (k > n) return;
      const double ratio = std::log(static_cast<double>(q)) /
                           std::log(static_cast<double>(k));
      const double scale = std::sqrt(w[static_cast<std::size_t>(k - 1)] /
                                     w[static_cast<std::size_t>(j - 1)]);
      col.emplace_back(static_cast<std::uint32_t>(k), bq * ratio * scale);
    });
    std::sort(col.begin(), col.end(),
              [](const auto& a, const auto& b) { return a.first < b.first; });
  }
  return m;
}

struct PowerIterationResult {
  double value = 0.0;
  bool converged = false;
  int iterations = 0;
};

namespace detail {

inline double vec_norm(const std::vector<Complex>& v) {
  KahanSum<double> s;
  for (const auto& x : v) s.add(std::norm(x));
  return std::sqrt(s.value());
}

/// Power iteration on M*M over the columns with index > column_cut
/// (column_cut = 0 uses the whole matrix).
inline PowerIterationResult power_iteration(const FiniteSectionMatrix& m,
                                            std::uint64_t column_cut, int iters,
                                            double tol) {
  if (iters < 1 || !(tol > 0.0))
    throw std::invalid_argument("operator_norm_estimate: iters >= 1 and tol > 0");
  const std::size_t n = static_cast<std::size_t>(m.n);
  std::vector<Complex> v(n, Complex(0.0));
  for (std::size_t j = column_cut; j < n; ++j) {
    // all-ones start with a deterministic perturbation to break symmetry
    v[j] = Complex(1.0 + 1e-3 * static_cast<double>(j % 97) / 97.0);
  }
  double nv = vec_norm(v);
  if (nv == 0.0) return {0.0, true, 0};
  for (auto& x : v) x /= nv;

  double prev = -1.0;
  PowerIterationResult res;
  for (int it = 1; it <= iters; ++it) {
    std::vector<Complex> mv = m.apply(v);
    const double s = vec_norm(mv);  // Rayleigh estimate of the top singular value
    res.iterations = it;
    if (s == 0.0) return {0.0, true, it};
    std::vector<Complex> back = m.apply_adjoint(mv);
    for (std::size_t j = 0; j < column_cut; ++j) back[j] = Complex(0.0);
    const double nb = vec_norm(back);
    if (nb == 0.0) return {s, true, it};
    for (auto& x : back) x /= nb;
    v = std::move(back);
    if (prev >= 0.0 && std::abs(s - prev) < tol) {
      res.value = s;
      res.converged = true;
      return res;
    }
    prev = s;
  }
  res.value = prev;
  res.converged = false;
  return res;
}

}  // namespace detail

/// Largest singular value of the finite section via adjoint-pair power
/// iteration; a non-converged run returns the best estimate flagged.
inline PowerIterationResult operator_norm_estimate(const FiniteSectionMatrix& m,
                                                   int iters = 2000, double tol = 1e-10) {
  return detail::power_iteration(m, 0, iters, tol);
}

/// Top-k singular values, descending (dense SVD; intended for moderate N).
inline std::vector<double> singular_values(const FiniteSectionMatrix& m, int k) {
  if (k < 0 || static_cast<std::uint64_t>(k) > m.n)
    throw std::invalid_argument("singular_values: k must lie in 0..N");
  Eigen::MatrixXcd dense = m.to_dense();
  Eigen::JacobiSVD<Eigen::MatrixXcd> svd(dense);
  std::vector<double> out;
  out.reserve(static_cast<std::size_t>(k));
  for (int i = 0; i < k; ++i) out.push_back(svd.singularValues()(i));
  return out;
}

/// Spectral norms of the sections with columns above each cut; decay towards
/// zero as the cut grows witnesses compactness at this truncation scale.
inline std::vector<std::pair<std::uint64_t, double>> compactness_profile(
    const FiniteSectionMatrix& m, const std::vector<std::uint64_t>& cut_points,
    int iters = 2000, double tol = 1e-10) {
  std::vector<std::pair<std::uint64_t, double>> out;
  out.reserve(cut_points.size());
  for (std::uint64_t cut : cut_points) {
    if (cut > m.n) throw std::out_of_range("compactness_profile: cut exceeds N");
    out.emplace_back(cut, detail::power_iteration(m, cut, iters, tol).value);
  }
  return out;
}

/// Cumulative sums S_N = sum_{n0 <= n <= N} |T_g e~_n|^p over the
/// orthonormal basis, p >= 2.  Each term has the closed coefficient form
/// sum_m |b_m|^2 (log m / (log n + log m))^2 w_{nm}/w_n.
inline std::vector<double> schatten_partial_sums(const DirichletSeries& g,
                                                 const AdmissibleMeasure& mu, double p,
                                                 std::uint64_t n_max,
                                                 const QuadratureConfig& cfg = {}) {
  if (!(p >= 2.0)) throw std::invalid_argument("schatten_partial_sums: requires p >= 2");
  std::uint64_t n0 = 0, g_max = 0;
  g.for_each([&](std::uint64_t m, Complex) {
    if (m >= 2) {
      if (n0 == 0) n0 = m;
      g_max = std::max(g_max, m);
    }
  });
  if (n0 == 0)
    throw std::domain_error("schatten_partial_sums: constant symbol has no action");
  auto w = WeightTableStore::instance().get(mu, n_max * g_max, cfg);
  std::vector<double> terms(static_cast<std::size_t>(n_max - n0 + 1), 0.0);
  const std::int64_t count = static_cast<std::int64_t>(terms.size());
#pragma omp parallel for schedule(static)
  for (std::int64_t i = 0; i < count; ++i) {
    const std::uint64_t nn = n0 + static_cast<std::uint64_t>(i);
    const double log_n = std::log(static_cast<double>(nn));
    KahanSum<double> sq;
    g.for_each([&](std::uint64_t mm, Complex b) {
      if (mm < 2) return;
      const double log_m = std::log(static_cast<double>(mm));
      const double lam = log_m / (log_n + log_m);
      sq.add(std::norm(b) * lam * lam * (*w)[static_cast<std::size_t>(nn * mm - 1)] /
             (*w)[static_cast<std::size_t>(nn - 1)]);
    });
    terms[static_cast<std::size_t>(i)] = std::pow(sq.value(), 0.5 * p);
  }
  std::vector<double> sums(terms.size());
  KahanSum<double> acc;
  for (std::size_t i = 0; i < terms.size(); ++i) {
    acc.add(terms[i]);
    sums[i] = acc.value();
  }
  return sums;
}

struct CarlesonEstimate {
  double estimate = 0.0;       // Monte-Carlo value of the triple integral
  double std_error = 0.0;      // over the character samples
  double coefficient_value = 0.0;  // |T_g f|^2 in the weighted coefficient norm
  double ratio = 0.0;          // estimate / coefficient_value
};

/// p = 2 Carleson quantity: the triple integral of
/// |f_chi|^2 |g'_chi|^2 beta_mu(sigma) over characters, Cauchy-weighted t and
/// sigma.  Characters are Monte-Carlo sampled on T^d; the t-integral against
/// the Cauchy density has the exact kernel min(k,l)/max(k,l), and sigma is
/// integrated by the composite rule on a fixed graded grid with beta_mu
/// precomputed at the nodes.  Reported next to the coefficient-route value of
/// |T_g f|^2 (whose constant term always vanishes).
inline CarlesonEstimate carleson_quantity_p2(const DirichletSeries& f,
                                             const DirichletSeries& g,
                                             const AdmissibleMeasure& mu, int d,
                                             std::uint64_t n_samples, std::uint64_t seed,
                                             const QuadratureConfig& cfg = {}) {
  if (n_samples < 2) throw std::invalid_argument("carleson_quantity_p2: need >= 2 samples");
  // H = f * g' carries the integrand: |f_chi g'_chi| = |H_chi|.
  const std::uint64_t n_h = f.truncation() * g.truncation();
  if (n_h > DirichletSeries::kDenseLimit)
    throw std::invalid_argument("carleson_quantity_p2: truncations too large");
  const DirichletSeries h = multiply(f, derivative(g), n_h);

  struct Node {
    std::uint64_t index;
    Complex coeff;
    std::vector<std::uint32_t> alpha;
  };
  std::vector<Node> nodes;
  h.for_each([&](std::uint64_t k, Complex c) {
    nodes.push_back({k, c, prime_exponents(k, d)});  // throws if not d-smooth
  });
  // verify smoothness of the inputs as stated, even when h collapses
  f.for_each([&](std::uint64_t k, Complex) { prime_exponents(k, d); });
  g.for_each([&](std::uint64_t k, Complex) { prime_exponents(k, d); });

  const DirichletSeries tgf = volterra_apply(g, f, n_h);
  const double coeff_norm = a2mu_norm(tgf, mu, cfg);
  CarlesonEstimate res;
  res.coefficient_value = coeff_norm * coeff_norm;
  if (nodes.empty()) return res;

  // Fixed sigma grid: graded panels near 0 for the beta weight, widening
  // panels out to the decay cutoff (smallest index of H is >= 2).
  std::vector<double> bp = graded_breakpoints(0.0, 1.0, 24, 0.5);
  for (double x = 1.25; x <= 8.0; x += 0.25) bp.push_back(x);
  for (double x = 8.5; x <= 16.0; x += 0.5) bp.push_back(x);
  for (double x = 17.0; x <= 64.0; x += 1.0) bp.push_back(x);
  std::vector<double> sig, wq;  // GL nodes and weights * beta_mu values
  for (std::size_t i = 0; i + 1 < bp.size(); ++i) {
    const double a = bp[i], b = bp[i + 1];
    const double mid = 0.5 * (a + b), half = 0.5 * (b - a);
    sig.push_back(mid);
    wq.push_back(half * detail::kGl15Weights[0]);
    for (int k = 1; k <= 7; ++k) {
      const double dx = half * detail::kGl15Nodes[k];
      sig.push_back(mid - dx);
      wq.push_back(half * detail::kGl15Weights[k]);
      sig.push_back(mid + dx);
      wq.push_back(half * detail::kGl15Weights[k]);
    }
  }
  const std::int64_t n_nodes = static_cast<std::int64_t>(sig.size());
#pragma omp parallel for schedule(dynamic, 8)
  for (std::int64_t i = 0; i < n_nodes; ++i) {
    wq[static_cast<std::size_t>(i)] *= beta_mu(mu, sig[static_cast<std::size_t>(i)], cfg);
  }

  // B(m) = int beta(sigma) m^(-sigma) dsigma for every needed product k*l.
  std::vector<std::uint64_t> products;
  for (const auto& a : nodes)
    for (const auto& b : nodes) products.push_back(a.index * b.index);
  std::sort(products.begin(), products.end());
  products.erase(std::unique(products.begin(), products.end()), products.end());
  std::vector<double> b_of(products.size(), 0.0);
  const std::int64_t n_products = static_cast<std::int64_t>(products.size());
#pragma omp parallel for schedule(static)
  for (std::int64_t i = 0; i < n_products; ++i) {
    const double lm = std::log(static_cast<double>(products[static_cast<std::size_t>(i)]));
    KahanSum<double> s;
    for (std::size_t q = 0; q < sig.size(); ++q) s.add(wq[q] * std::exp(-lm * sig[q]));
    b_of[static_cast<std::size_t>(i)] = s.value();
  }
  auto b_lookup = [&](std::uint64_t m) {
    auto it = std::lower_bound(products.begin(), products.end(), m);
    return b_of[static_cast<std::size_t>(it - products.begin())];
  };

  // Per character chi: I(chi) = sum_{k,l} u_k conj(u_l) min(k,l)/max(k,l) B(kl)
  // with u_k = c_k chi(k); the Cauchy t-average of (k/l)^(-it) is
  // min(k,l)/max(k,l).
  Rng rng(seed);
  KahanSum<double> acc, acc_sq;
  std::vector<Complex> u(nodes.size());
  for (std::uint64_t s_i = 0; s_i < n_samples; ++s_i) {
    std::vector<Complex> chi_p(static_cast<std::size_t>(d));
    for (auto& c : chi_p) c = rng.unit_circle();
    for (std::size_t a = 0; a < nodes.size(); ++a) {
      Complex ua = nodes[a].coeff;
      for (int j = 0; j < d; ++j)
        for (std::uint32_t e = 0; e < nodes[a].alpha[static_cast<std::size_t>(j)]; ++e)
          ua *= chi_p[static_cast<std::size_t>(j)];
      u[a] = ua;
    }
    double total = 0.0;
    for (std::size_t a = 0; a < nodes.size(); ++a) {
      for (std::size_t b = 0; b <= a; ++b) {
        const std::uint64_t ka = nodes[a].index, kb = nodes[b].index;
        const double kernel = static_cast<double>(std::min(ka, kb)) /
                              static_cast<double>(std::max(ka, kb));
        const double bint = b_lookup(ka * kb);
        const Complex prod = u[a] * std::conj(u[b]);
        total += (a == b ? 1.0 : 2.0) * kernel * bint * prod.real();
      }
    }
    acc.add(total);
    acc_sq.add(total * total);
  }
  const double mean = acc.value() / static_cast<double>(n_samples);
  const double var =
      std::max(0.0, acc_sq.value() / static_cast<double>(n_samples) - mean * mean);
  res.estimate = mean;
  res.std_error = std::sqrt(var / static_cast<double>(n_samples));
  res.ratio = res.coefficient_value > 0.0 ? res.estimate / res.coefficient_value : 0.0;
  return res;
}

}  // namespace dvlab
