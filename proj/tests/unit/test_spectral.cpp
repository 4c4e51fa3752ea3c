#include "doctest.h"

#include <cmath>
#include <random>

#include "dampinv/error.hpp"
#include "dampinv/spectral.hpp"
#include "oracles.hpp"

using namespace dampinv;
using oracle::pi;

namespace {

SampledFunction1D sampled(double (*f)(double), std::size_t n) { return SampledFunction1D::sample(f, n); }

}  // namespace

TEST_CASE("eigenvalues follow the half-integer formula") {
  CHECK(eigenpair({0, 0}).lambda == doctest::Approx(pi * pi / 2));
  CHECK(eigenpair({1, 0}).lambda == doctest::Approx(2.5 * pi * pi));
  CHECK(eigenpair({2, 3}).lambda == doctest::Approx(18.5 * pi * pi));
  CHECK(eigenpair({2, 3}).lambda == doctest::Approx(182.58).epsilon(1e-4));
  const auto e = eigenpair({1, 2});
  CHECK(e.omega * e.omega == doctest::Approx(e.lambda));
}

TEST_CASE("2-D modes: values, Dirichlet zeros and unit norm") {
  CHECK(eval_phi2d({0, 0}, 0.0, 0.0) == doctest::Approx(2.0));
  for (int k = 0; k < 4; ++k) {
    for (double y : {0.0, 0.3, 0.9}) {
      CHECK(std::abs(eval_phi2d({k, 1}, 1.0, y)) < 1e-14);
      CHECK(std::abs(eval_phi2d({1, k}, y, 1.0)) < 1e-14);
    }
  }
  // Tensor trapezoid at n = 513 against the analytic value 4 * 1/2 * 1/2.
  const std::size_t n = 513;
  std::vector<double> col(n);
  for (std::size_t j = 0; j < n; ++j) {
    std::vector<double> row(n);
    const double y = static_cast<double>(j) / (n - 1);
    for (std::size_t i = 0; i < n; ++i) {
      const double v = eval_phi2d({0, 0}, static_cast<double>(i) / (n - 1), y);
      row[i] = v * v;
    }
    col[j] = oracle::trapezoid(row);
  }
  CHECK(oracle::trapezoid(col) == doctest::Approx(1.0).epsilon(1e-10));
}

TEST_CASE("1-D modes are orthonormal") {
  CHECK(eval_phi1d(0, 0.0) == doctest::Approx(std::sqrt(2.0)));
  CHECK(std::abs(eval_phi1d(0, 1.0)) < 1e-15);
  const std::size_t n = 1025;
  for (int k = 0; k <= 8; ++k) {
    for (int q = 0; q <= 8; ++q) {
      std::vector<double> v(n);
      for (std::size_t i = 0; i < n; ++i) {
        const double s = static_cast<double>(i) / (n - 1);
        v[i] = eval_phi1d(k, s) * eval_phi1d(q, s);
      }
      CHECK(std::abs(oracle::trapezoid(v) - (k == q ? 1.0 : 0.0)) < 1e-9);
    }
  }
}

TEST_CASE("discrete Laplacian of a sampled mode approximates -lambda phi at second order") {
  auto max_err = [](std::size_t n, ModeIndex m) {
    const double h = 1.0 / (n - 1);
    double err = 0.0;
    for (std::size_t j = 1; j + 1 < n; ++j) {
      for (std::size_t i = 1; i + 1 < n; ++i) {
        auto f = [&](std::size_t a, std::size_t b) { return eval_phi2d(m, a * h, b * h); };
        const double lap = (f(i + 1, j) + f(i - 1, j) + f(i, j + 1) + f(i, j - 1) - 4 * f(i, j)) / (h * h);
        err = std::max(err, std::abs(lap + eigenpair(m).lambda * f(i, j)));
      }
    }
    return err;
  };
  for (ModeIndex m : {ModeIndex{0, 0}, ModeIndex{1, 2}}) {
    const double ratio = max_err(33, m) / max_err(65, m);
    CHECK(ratio > 3.8);
    CHECK(ratio < 4.2);
  }
}

TEST_CASE("Fourier projection against closed forms") {
  const std::size_t n = 2049;
  const auto one = SampledFunction1D::constant(1.0, n);
  CHECK(fourier_project(one, 0).coeffs[0] == doctest::Approx(2 * std::sqrt(2.0) / pi).epsilon(1e-6));

  const auto p0 = sampled([](double s) { return oracle::phi1(0, s); }, n);
  const auto c = fourier_project(p0, 5).coeffs;
  CHECK(c.size() == 6);
  CHECK(c[0] == doctest::Approx(1.0).epsilon(1e-6));
  for (std::size_t k = 1; k < c.size(); ++k) CHECK(std::abs(c[k]) < 1e-6);

  const double expected = std::sqrt(2.0) * (2 / pi - 4 / (pi * pi));
  const double quad = oracle::simpson([](double s) { return s * oracle::phi1(0, s); }, 0, 1);
  CHECK(quad == doctest::Approx(expected).epsilon(1e-10));
  CHECK(fourier_project(sampled([](double s) { return s; }, n), 0).coeffs[0] ==
        doctest::Approx(expected).epsilon(1e-6));
  CHECK(expected == doctest::Approx(0.3272).epsilon(1e-4));
}

TEST_CASE("Fourier projection refuses under-resolved orders") {
  const auto f = SampledFunction1D::constant(1.0, 17);
  CHECK_NOTHROW(fourier_project(f, 3));
  CHECK_THROWS_AS(fourier_project(f, 4), ResolutionError);
}

TEST_CASE("synthesis inverts projection and converges for f = 1") {
  const std::size_t n = 1025;
  const auto syn0 = fourier_synthesize({Side::Gamma11, {1.0, 0.0, 0.0}}, n);
  for (std::size_t i = 0; i < n; ++i) CHECK(syn0[i] == doctest::Approx(oracle::phi1(0, syn0.node(i))));
  const auto zero = fourier_synthesize({Side::Gamma11, {0.0, 0.0}}, n);
  CHECK(zero.max_abs() == 0.0);

  const std::vector<double> coeffs{0.3, -1.2, 0.7, 0.05};
  const auto back = fourier_project(fourier_synthesize({Side::Gamma12, coeffs}, n), 3, Side::Gamma12);
  for (std::size_t k = 0; k < coeffs.size(); ++k) CHECK(back.coeffs[k] == doctest::Approx(coeffs[k]).epsilon(1e-6));

  const auto one = SampledFunction1D::constant(1.0, n);
  double prev = 1e300;
  for (int N = 0; N <= 8; ++N) {
    const double err = sobolev_norms(fourier_synthesize(fourier_project(one, N), n) - one).l2;
    // The tail of the series: 1 - sum_k (2 sqrt2 / ((2k+1) pi))^2.
    double tail = 1.0;
    for (int k = 0; k <= N; ++k) tail -= 8.0 / ((2 * k + 1) * (2 * k + 1) * pi * pi);
    CHECK(err == doctest::Approx(std::sqrt(tail)).epsilon(2e-2));
    CHECK(err < prev);
    prev = err;
  }
}

TEST_CASE("Parseval inequality at truncation") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(-1, 1);
  for (int t = 0; t < 10; ++t) {
    const double a = u(rng), b = u(rng), w = 5 * u(rng);
    const auto f = SampledFunction1D::sample([&](double s) { return a + b * std::sin(w * s); }, 513);
    const auto c = fourier_project(f, 6).coeffs;
    double sum = 0.0;
    for (double x : c) sum += x * x;
    const double l2 = sobolev_norms(f).l2;
    CHECK(sum <= l2 * l2 + 1e-8);
  }
}

TEST_CASE("Sobolev norms of simple functions") {
  const std::size_t n = 1025;
  const auto one = sobolev_norms(SampledFunction1D::constant(1.0, n));
  CHECK(one.l2 == doctest::Approx(1.0));
  CHECK(one.h1 == doctest::Approx(1.0));
  CHECK(one.h_half == doctest::Approx(1.0));
  const auto zero = sobolev_norms(SampledFunction1D::constant(0.0, n));
  CHECK(zero.l2 == 0.0);
  CHECK(zero.h1 == 0.0);
  CHECK(zero.h_half == 0.0);

  const auto id = sobolev_norms(sampled([](double s) { return s; }, n));
  CHECK(id.l2 == doctest::Approx(1 / std::sqrt(3.0)).epsilon(1e-6));
  CHECK(id.h1 == doctest::Approx(std::sqrt(4.0 / 3.0)).epsilon(1e-6));
  // For f(s) = s the Gagliardo integrand is identically 1 off the diagonal.
  CHECK(std::isfinite(id.h_half));
  CHECK(id.h_half * id.h_half == doctest::Approx(1.0 / 3.0 + 1.0).epsilon(1e-2));
}

TEST_CASE("Hoelder seminorm") {
  CHECK(holder_seminorm(SampledFunction1D::constant(3.0, 65), 0.7) == 0.0);
  const auto id = sampled([](double s) { return s; }, 129);
  CHECK(holder_seminorm(id, 1.0) == doctest::Approx(1.0));
  CHECK(holder_seminorm(id, 0.6) == doctest::Approx(1.0));

  // With alpha = 1 it is the largest slope of the interpolant.
  const auto f = sampled([](double s) { return std::sin(5 * s) + s * s; }, 257);
  double slope = 0.0;
  for (std::size_t i = 1; i < f.size(); ++i) slope = std::max(slope, std::abs(f[i] - f[i - 1]) / f.spacing());
  CHECK(holder_seminorm(f, 1.0) == doctest::Approx(slope).epsilon(1e-12));
}

TEST_CASE("multiplier bound") {
  const std::size_t n = 257;
  const auto f = sampled([](double s) { return std::cos(3 * s) + s; }, n);
  const auto unit = multiplier_bound_check(SampledFunction1D::constant(1.0, n), f, 1.0);
  CHECK(unit.lhs == doctest::Approx(sobolev_norms(f).h_half));
  CHECK(unit.rhs == doctest::Approx(unit.lhs));
  CHECK(unit.holds);

  const auto zero = multiplier_bound_check(SampledFunction1D::constant(0.0, n), f, 0.8);
  CHECK(zero.lhs == 0.0);
  CHECK(zero.holds);

  const auto a = sampled([](double s) { return 1 + s / 2; }, n);
  const auto p0 = sampled([](double s) { return oracle::phi1(0, s); }, n);
  CHECK(multiplier_bound_check(a, p0, 0.75).holds);

  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(0, 1);
  int violations = 0;
  for (int t = 0; t < 50; ++t) {
    const double alpha = 0.51 + 0.49 * u(rng);
    const double c0 = u(rng), c1 = u(rng), w = 1 + 8 * u(rng);
    const double f0 = u(rng), f1 = u(rng), fw = 1 + 8 * u(rng);
    const auto aa = SampledFunction1D::sample([&](double s) { return c0 + c1 * std::sin(w * s); }, n);
    const auto ff = SampledFunction1D::sample([&](double s) { return f0 + f1 * std::cos(fw * s); }, n);
    violations += !multiplier_bound_check(aa, ff, alpha).holds;
  }
  CHECK(violations == 0);
}

TEST_CASE("corner compatibility integral") {
  const std::size_t n = 1025;
  const auto t = sampled([](double s) { return s; }, n);
  const auto zero = SampledFunction1D::constant(0.0, n);
  const auto one = SampledFunction1D::constant(1.0, n);

  const auto same = compat_integral(t, t);
  CHECK(same.value == 0.0);
  CHECK_FALSE(same.divergent);

  const auto lin = compat_integral(t, zero);
  CHECK(lin.value == doctest::Approx(0.5).epsilon(1e-5));
  CHECK_FALSE(lin.divergent);

  CHECK(compat_integral(one, zero).divergent);
}

TEST_CASE("damping compatibility") {
  const std::size_t n = 1025;
  const auto t = sampled([](double s) { return s; }, n);
  const auto one = SampledFunction1D::constant(1.0, n);
  CHECK(damping_compat_check(DampingPair::constant(1.0, n), t, t));
  CHECK(damping_compat_check(DampingPair::constant(1.0, n), one, one));

  const DampingPair a(sampled([](double s) { return 1 + s; }, n), sampled([](double s) { return 1 + s * s; }, n));
  CHECK(damping_compat_check(a, t, t));
  // |a1 t - a2 t|^2 / t = t (t - t^2)^2, whose integral is 1/60.
  const double oracle_value =
      oracle::simpson([](double s) { return s * std::pow(s - s * s, 2); }, 0, 1);
  CHECK(oracle_value == doctest::Approx(1.0 / 60.0));
  CHECK(compat_integral(a.a1() * t, a.a2() * t).value == doctest::Approx(oracle_value).epsilon(1e-3));
}

TEST_CASE("damping pair construction") {
  const std::size_t n = 33;
  CHECK_THROWS_AS(DampingPair(SampledFunction1D::constant(1.0, n), SampledFunction1D::constant(1.1, n)),
                  InvalidArgument);
  CHECK_THROWS_AS(DampingPair(SampledFunction1D::constant(-1.0, n), SampledFunction1D::constant(-1.0, n)),
                  InvalidArgument);
  CHECK_THROWS_AS(DampingPair(SampledFunction1D::constant(1.0, n), SampledFunction1D::constant(1.0, n + 1)),
                  InvalidArgument);

  const DampingPair a(sampled([](double s) { return 1 + s; }, n), SampledFunction1D::constant(1.0, n));
  CHECK(a.corner() == 1.0);
  CHECK(a.min() == 1.0);
  CHECK(a.max() == doctest::Approx(2.0));
  const auto sw = a.swapped();
  CHECK(sw.a1()[n - 1] == 1.0);
  CHECK(sw.a2()[n - 1] == doctest::Approx(2.0));
  CHECK(DampingPair::zero(n).is_zero());
  CHECK(a.scaled(0.5).max() == doctest::Approx(1.0));
  CHECK(a.l2_norm() == doctest::Approx(std::sqrt(7.0 / 3.0 + 1.0)).epsilon(1e-3));
}
