#include "catch2/catch_amalgamated.hpp"

#include <cmath>
#include <complex>
#include <vector>

#include "dvlab/polydisc.hpp"
#include "dvlab/polydisc_polynomial.hpp"
#include "dvlab/random.hpp"

using namespace dvlab;

namespace {

PolydiscPolynomial constant_poly(int d, Complex c) {
  PolydiscPolynomial p(d);
  p.add_term(PolydiscPolynomial::Index(d, 0), c);
  return p;
}

PolydiscPolynomial random_poly(int d, std::uint32_t max_deg, Rng& rng) {
  PolydiscPolynomial p(d);
  PolydiscPolynomial::Index idx(d, 0);
  // dense up to max_deg per coordinate with random complex coefficients
  const std::size_t total = static_cast<std::size_t>(std::pow(max_deg + 1.0, d));
  for (std::size_t flat = 0; flat < total; ++flat) {
    std::size_t rest = flat;
    for (int j = 0; j < d; ++j) {
      idx[static_cast<std::size_t>(j)] = static_cast<std::uint32_t>(rest % (max_deg + 1));
      rest /= (max_deg + 1);
    }
    if (rng.uniform() < 0.7) {
      p.add_term(idx, Complex(rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0)));
    }
  }
  if (p.term_count() == 0) p.add_term(idx, Complex(1.0));
  return p;
}

}  // namespace

TEST_CASE("bergman norm on the polydisc") {
  CHECK(bergman_norm_polydisc(constant_poly(2, Complex(1.0))) == 1.0);
  for (std::uint32_t k : {1u, 3u, 7u}) {
    PolydiscPolynomial p(1);
    p.add_term({k}, Complex(1.0));
    CHECK(bergman_norm_polydisc(p) ==
          Catch::Approx(1.0 / std::sqrt(static_cast<double>(k + 1))).epsilon(1e-14));
  }

  // Monte-Carlo oracle over the polydisc with normalized area sampling
  Rng rng(61);
  auto f = random_poly(2, 3, rng);
  Rng mc(62);
  KahanSum<double> acc, acc_sq;
  const int samples = 200000;
  for (int i = 0; i < samples; ++i) {
    std::vector<Complex> z = {mc.in_disc(), mc.in_disc()};
    const double v = std::norm(f.evaluate(z));
    acc.add(v);
    acc_sq.add(v * v);
  }
  const double mean = acc.value() / samples;
  const double se = std::sqrt(
      std::max(0.0, acc_sq.value() / samples - mean * mean) / samples);
  const double exact = bergman_norm_polydisc(f);
  CHECK(std::abs(mean - exact * exact) <= 3.0 * se);
}

TEST_CASE("polydisc bloch seminorm") {
  CHECK(polydisc_bloch_seminorm(constant_poly(2, Complex(4.0)),
                                PolydiscGrid::standard()) == 0.0);

  PolydiscPolynomial z1(1);
  z1.add_term({1}, Complex(1.0));
  CHECK(polydisc_bloch_seminorm(z1, PolydiscGrid::standard()) ==
        Catch::Approx(1.0).epsilon(1e-12));  // (1 - r^2) maximal at the origin

  // truncated -log(1-z): derivative (1-z^200)/(1-z); positive coefficients
  // put the grid max on the positive real axis, where the one-variable
  // calculus oracle (1+r)(1-r^200) applies
  PolydiscPolynomial log_series(1);
  for (std::uint32_t k = 1; k <= 200; ++k)
    log_series.add_term({k}, Complex(1.0 / static_cast<double>(k)));
  PolydiscGrid fine;
  fine.angular = 8;
  for (int i = 0; i <= 400; ++i) fine.radii.push_back(0.9999 * i / 400.0);
  const double sem = polydisc_bloch_seminorm(log_series, fine);
  double oracle = 0.0;
  for (double r : fine.radii)
    oracle = std::max(oracle, (1.0 + r) * (1.0 - std::pow(r, 200.0)));
  CHECK(sem == Catch::Approx(oracle).epsilon(1e-12));
  CHECK(sem > 1.9);
  CHECK(sem < 2.0);
}

TEST_CASE("mobius composition") {
  Rng rng(67);
  auto f = random_poly(2, 2, rng);

  // identity tuple leaves the polynomial alone
  MobiusTuple id;
  id.center = {Complex(0.0), Complex(0.0)};
  id.sign = {Complex(1.0), Complex(1.0)};
  id.permutation = {0, 1};
  auto composed = mobius_compose(f, id, 12);
  CHECK(composed.norm_tail_bound == 0.0);
  for (const auto& [idx, c] : f.terms()) {
    CHECK(std::abs(composed.value.coefficient(idx) - c) < 1e-14);
  }

  // single-coordinate check: the composed constant term is Phi(0) = -eps a
  PolydiscPolynomial lin(1);
  lin.add_term({1}, Complex(1.0));
  MobiusTuple t;
  t.center = {Complex(0.3, 0.1)};
  t.sign = {Complex(1.0)};
  t.permutation = {0};
  auto moved = mobius_compose(lin, t, 30);
  CHECK(std::abs(moved.value.coefficient({0}) - (-t.center[0])) < 1e-14);

  // pointwise oracle: composed series evaluated on a sample set matches
  // direct evaluation of f(Phi(z)) within the certified tail bound
  auto phi = MobiusTuple::involution({Complex(0.4, -0.2), Complex(-0.25, 0.35)});
  auto comp = mobius_compose(f, phi, 60);
  Rng pts(71);
  for (int i = 0; i < 100; ++i) {
    std::vector<Complex> z = {pts.in_disc(0.6), pts.in_disc(0.6)};
    const Complex direct = f.evaluate(phi.apply(z));
    const Complex series = comp.value.evaluate(z);
    CHECK(std::abs(direct - series) < 1e-7 + comp.norm_tail_bound);
  }

  // involution composed twice restores the polynomial pointwise
  auto once = mobius_compose(f, phi, 40);
  auto twice = mobius_compose(once.value, phi, 40);
  for (int i = 0; i < 50; ++i) {
    std::vector<Complex> z = {pts.in_disc(0.5), pts.in_disc(0.5)};
    CHECK(std::abs(twice.value.evaluate(z) - f.evaluate(z)) < 1e-5);
  }

  CHECK_THROWS_AS(mobius_compose(f, phi, 1), std::invalid_argument);
}

TEST_CASE("mobius invariance of the bloch quantity") {
  Rng rng(73);
  auto f = random_poly(2, 2, rng);
  MobiusTuple phi;
  phi.center = {Complex(0.2, 0.3), Complex(-0.4, 0.1)};
  phi.sign = {Complex(0.0, 1.0), Complex(1.0)};
  phi.permutation = {1, 0};
  auto comp = mobius_compose(f, phi, 64);

  std::vector<PolydiscPolynomial> df = {f.partial_derivative(0), f.partial_derivative(1)};
  std::vector<PolydiscPolynomial> dc = {comp.value.partial_derivative(0),
                                        comp.value.partial_derivative(1)};
  Rng pts(79);
  for (int i = 0; i < 40; ++i) {
    std::vector<Complex> z = {pts.in_disc(0.45), pts.in_disc(0.45)};
    const auto w = phi.apply(z);
    for (int v = 0; v < 2; ++v) {
      // coordinate v of z feeds output j with permutation[j] = v
      const int j = phi.permutation[0] == v ? 0 : 1;
      const double lhs = std::abs(dc[static_cast<std::size_t>(v)].evaluate(z)) *
                         (1.0 - std::norm(z[static_cast<std::size_t>(v)]));
      const double rhs = std::abs(df[static_cast<std::size_t>(j)].evaluate(w)) *
                         (1.0 - std::norm(w[static_cast<std::size_t>(j)]));
      CHECK(lhs == Catch::Approx(rhs).margin(1e-6));
    }
  }
}

TEST_CASE("garsia norm") {
  auto centers = sample_centers(2, 12, 0.6, 83);
  CHECK(garsia_norm(constant_poly(2, Complex(2.5)), centers, 40).value ==
        Catch::Approx(0.0).margin(1e-12));

  // at the origin the garsia seminorm collapses to the centered bergman norm
  Rng rng(89);
  auto f = random_poly(2, 2, rng);
  auto origin = std::vector<MobiusTuple>{
      MobiusTuple::involution({Complex(0.0), Complex(0.0)})};
  const double at0 = garsia_norm(f, origin, 20).value;
  const double norm_sq = bergman_norm_polydisc(f) * bergman_norm_polydisc(f);
  const double f0_sq = std::norm(f.constant_term());
  CHECK(at0 == Catch::Approx(std::sqrt(norm_sq - f0_sq)).epsilon(1e-12));

  // empirical comparability with the derivative seminorm
  for (int rep = 0; rep < 5; ++rep) {
    auto g = random_poly(2, 2, rng);
    const double garsia = garsia_norm(g, centers, 48).value;
    const double bloch = polydisc_bloch_seminorm(g, PolydiscGrid::standard(16, 12, 0.95));
    if (bloch < 1e-12) continue;
    const double ratio = garsia / bloch;
    INFO("garsia/bloch ratio " << ratio);
    CHECK(ratio > 0.02);
    CHECK(ratio < 50.0);
  }
}

TEST_CASE("pythagoras in coefficient arithmetic") {
  Rng rng(97);
  for (int rep = 0; rep < 10; ++rep) {
    auto f = random_poly(2, 2, rng);
    for (int k = 1; k <= 3; ++k) {
      auto fk = power(f, k);
      auto centered = fk;
      centered.add_term(PolydiscPolynomial::Index(2, 0), -fk.constant_term());
      const double lhs = std::pow(bergman_norm_polydisc(centered), 2);
      const double rhs = std::pow(bergman_norm_polydisc(fk), 2) -
                         std::norm(fk.constant_term());
      CHECK(lhs == Catch::Approx(rhs).margin(1e-12));
    }
  }
}

TEST_CASE("radicality") {
  Rng rng(101);
  auto f = random_poly(2, 1, rng);
  auto centers = sample_centers(2, 10, 0.55, 103);

  // m = n is equality
  auto eq = radicality_check(f, 2, 2, centers, 24);
  for (const auto& e : eq.entries) {
    CHECK(e.lhs == Catch::Approx(e.rhs).margin(1e-10));
    CHECK_FALSE(e.violation);
  }

  // scalar route at the origin: |f - f(0)| <= |f^2 - f^2(0)|^(1/2) via
  // pythagoras and (x + y)^a >= x^a + y^a
  auto origin = std::vector<MobiusTuple>{
      MobiusTuple::involution({Complex(0.0), Complex(0.0)})};
  for (int rep = 0; rep < 10; ++rep) {
    auto g = random_poly(2, 2, rng);
    auto rep12 = radicality_check(g, 2, 1, origin, 20);
    REQUIRE(rep12.entries.size() == 1);
    CHECK(rep12.entries[0].lhs <= rep12.entries[0].rhs + 1e-10);
    CHECK_FALSE(rep12.any_violation);
  }

  // randomized sweep, d in {1,2}; the acceptance suite runs the full sizes
  int checked = 0;
  for (int rep = 0; rep < 12; ++rep) {
    const int d = 1 + rep % 2;
    auto g = random_poly(d, d == 1 ? 3 : 1, rng);
    auto cs = sample_centers(d, 6, 0.5, 200 + static_cast<std::uint64_t>(rep));
    const int n = 2 + rep % 3;
    const int m = 1 + rep % n;
    const std::uint32_t cap =
        static_cast<std::uint32_t>(n) * (d == 1 ? 3u : 1u) + 40u;
    auto report = radicality_check(g, n, m, cs, cap);
    CHECK_FALSE(report.any_violation);
    checked += static_cast<int>(report.entries.size());
  }
  CHECK(checked > 0);

  // monotone norm chain at the origin
  for (int rep = 0; rep < 5; ++rep) {
    auto g = random_poly(2, 1, rng);
    double prev = 0.0;
    for (int mpow = 1; mpow <= 5; ++mpow) {
      auto gm = power(g, mpow);
      auto centered = gm;
      centered.add_term(PolydiscPolynomial::Index(2, 0), -gm.constant_term());
      const double value = std::pow(bergman_norm_polydisc(centered), 1.0 / mpow);
      if (mpow > 1) CHECK(value >= prev - 1e-10);
      prev = value;
    }
  }

  CHECK_THROWS_AS(radicality_check(f, 4, 1, centers, 2), std::invalid_argument);
}
