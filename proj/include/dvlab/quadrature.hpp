#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <queue>
#include <stdexcept>
#include <string>
#include <vector>

namespace dvlab {

/// Thrown when an iterative numerical routine fails to reach its tolerance.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Tolerances and budgets for the adaptive integrator.  upper_cutoff = 0
/// means the caller (or integrand owner) picks the truncation point.
struct QuadratureConfig {
  double abs_tol = 1e-12;
  double rel_tol = 1e-10;
  int max_subdivisions = 6000;
  double upper_cutoff = 0.0;
};

namespace detail {

// 15-point Gauss-Legendre rule on [-1, 1] (positive half; rule is symmetric).
inline constexpr double kGl15Nodes[8] = {
    0.00000000000000000000, 0.20119409399743451439, 0.39415134707756338539,
    0.57097217260853883047, 0.72441773136017006962, 0.84820658341042720618,
    0.93727339240070595139, 0.98799251802048537741};
inline constexpr double kGl15Weights[8] = {
    0.20257824192556089793, 0.19843148532711124554, 0.18616100001556187826,
    0.16626920581699378143, 0.13957067792615390767, 0.10715922046717177296,
    0.07036604748810806886, 0.03075324199611864651};

inline double value_norm(double v) { return std::abs(v); }
inline double value_norm(const std::complex<double>& v) { return std::abs(v); }

template <typename Value, typename F>
Value gl15_panel(F&& f, double a, double b) {
  const double mid = 0.5 * (a + b);
  const double half = 0.5 * (b - a);
  Value sum = kGl15Weights[0] * f(mid);
  for (int i = 1; i < 8; ++i) {
    const double dx = half * kGl15Nodes[i];
    sum += kGl15Weights[i] * (f(mid + dx) + f(mid - dx));
  }
  return half * sum;
}

}  // namespace detail

template <typename Value>
struct QuadratureResult {
  Value value{};
  double error_estimate = 0.0;
  int subdivisions = 0;
  bool converged = false;
};

/// Adaptive composite Gauss-Legendre integration with interval bisection.
/// The panel with the largest bisection discrepancy is split first, so
/// endpoint singularities are refined without starving smooth regions.
/// `breakpoints` must be an increasing sequence; each consecutive pair seeds
/// an initial panel.
template <typename Value, typename F>
QuadratureResult<Value> integrate_adaptive_seeded(F&& f,
                                                  const std::vector<double>& breakpoints,
                                                  const QuadratureConfig& cfg) {
  struct Panel {
    double a, b;
    Value whole;        // GL15 over [a, b]
    Value refined;      // GL15 over the two halves
    double err;
    bool operator<(const Panel& o) const { return err < o.err; }
  };

  auto make_panel = [&f](double a, double b) {
    Panel p;
    p.a = a;
    p.b = b;
    const double mid = 0.5 * (a + b);
    p.whole = detail::gl15_panel<Value>(f, a, b);
    p.refined = detail::gl15_panel<Value>(f, a, mid) +
                detail::gl15_panel<Value>(f, mid, b);
    p.err = detail::value_norm(p.whole - p.refined);
    return p;
  };

  std::priority_queue<Panel> heap;
  Value total{};
  double total_err = 0.0;
  for (std::size_t i = 0; i + 1 < breakpoints.size(); ++i) {
    Panel p = make_panel(breakpoints[i], breakpoints[i + 1]);
    total += p.refined;
    total_err += p.err;
    heap.push(std::move(p));
  }

  QuadratureResult<Value> res;
  int splits = 0;
  auto tolerance = [&] {
    return std::max(cfg.abs_tol, cfg.rel_tol * detail::value_norm(total));
  };
  while (total_err > tolerance() && splits < cfg.max_subdivisions) {
    Panel worst = heap.top();
    if (worst.err <= 0.0) break;
    heap.pop();
    const double mid = 0.5 * (worst.a + worst.b);
    if (mid <= worst.a || mid >= worst.b) {
      // Interval no longer representable; its error stays in the budget.
      total_err -= worst.err;
      ++splits;
      continue;
    }
    total -= worst.refined;
    total_err -= worst.err;
    Panel left = make_panel(worst.a, mid);
    Panel right = make_panel(mid, worst.b);
    total += left.refined + right.refined;
    total_err += left.err + right.err;
    heap.push(std::move(left));
    heap.push(std::move(right));
    ++splits;
  }

  res.value = total;
  res.error_estimate = total_err;
  res.subdivisions = splits;
  res.converged = total_err <= tolerance();
  return res;
}

template <typename Value, typename F>
QuadratureResult<Value> integrate_adaptive_nothrow(F&& f, double a, double b,
                                                   const QuadratureConfig& cfg) {
  if (!(b > a)) return {};
  // Seeding with several panels guards against a lone panel whose bisection
  // discrepancy vanishes by symmetry.
  std::vector<double> bp;
  const int seeds = 4;
  for (int i = 0; i <= seeds; ++i) bp.push_back(a + (b - a) * i / seeds);
  return integrate_adaptive_seeded<Value>(std::forward<F>(f), bp, cfg);
}

template <typename F>
double integrate_adaptive(F&& f, double a, double b, const QuadratureConfig& cfg) {
  auto res = integrate_adaptive_nothrow<double>(std::forward<F>(f), a, b, cfg);
  if (!res.converged) {
    throw NumericalError(
        "adaptive quadrature did not converge: interval [" + std::to_string(a) +
        ", " + std::to_string(b) + "], error estimate " +
        std::to_string(res.error_estimate) + " after " +
        std::to_string(res.subdivisions) + " subdivisions");
  }
  return res.value;
}

/// Geometrically graded breakpoints accumulating at `a`, for integrands with
/// an endpoint singularity there.  Returns a..b split at a + (b-a)*ratio^k.
inline std::vector<double> graded_breakpoints(double a, double b, int levels,
                                              double ratio = 0.25) {
  std::vector<double> bp;
  bp.push_back(a);
  double scale = 1.0;
  for (int i = 0; i < levels; ++i) scale *= ratio;
  for (int i = levels; i >= 1; --i) {
    bp.push_back(a + (b - a) * scale);
    scale /= ratio;
  }
  bp.push_back(b);
  return bp;
}

/// Compensated (Kahan) accumulator; used for long coefficient sums where
/// naive accumulation would lose the tolerance budget.
template <typename T>
class KahanSum {
 public:
  void add(T x) {
    T y = x - comp_;
    T t = sum_ + y;
    comp_ = (t - sum_) - y;
    sum_ = t;
  }
  T value() const { return sum_; }

 private:
  T sum_{};
  T comp_{};
};

}  // namespace dvlab
