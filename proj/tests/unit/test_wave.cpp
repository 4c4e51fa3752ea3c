#include "doctest.h"

#include <cmath>
#include <random>
#include <sstream>

#include "dampinv/error.hpp"
#include "dampinv/wave.hpp"
#include "oracles.hpp"

using namespace dampinv;

namespace {

/// Trapezoid L2 distance between the solver field and the standing wave.
double modal_error(std::size_t n, ModeIndex m, double tau) {
  const Grid2D g(n);
  const auto r = solve(g, mode_field(g, m), Field(g.size(), 0.0), DampingPair::zero(n), nullptr, tau);
  const double t = r.final.t;
  const double c = std::cos(std::sqrt(oracle::lambda(m.k, m.l)) * t);
  const double h = g.h();
  double acc = 0.0;
  for (std::size_t j = 0; j < n; ++j) {
    for (std::size_t i = 0; i < n; ++i) {
      const double w = ((i == 0 || i == n - 1) ? 0.5 : 1.0) * ((j == 0 || j == n - 1) ? 0.5 : 1.0);
      const double e = r.final.u[g.index(i, j)] - c * oracle::phi2(m.k, m.l, i * h, j * h);
      acc += w * e * e;
    }
  }
  return std::sqrt(acc) * h;
}

}  // namespace

TEST_CASE("grid validation and time step") {
  CHECK_THROWS_AS(Grid2D(5), InvalidArgument);
  const Grid2D g(33);
  CHECK(g.h() == doctest::Approx(1.0 / 32));
  CHECK(g.max_stable_dt() == doctest::Approx(g.h() / std::sqrt(2.0)));
  CHECK(g.default_dt() == doctest::Approx(0.5 * g.h() / std::sqrt(2.0)));
  CHECK(g.dirichlet(32, 0));
  CHECK(g.dirichlet(0, 32));
  CHECK_FALSE(g.dirichlet(0, 0));
}

TEST_CASE("step: zero stays zero and the time step is bounded") {
  const Grid2D g(17);
  const auto a = DampingPair::constant(1.0, 17);
  const auto s = step(g, WaveState::zero(g), a, nullptr, g.default_dt());
  for (double x : s.u) CHECK(x == 0.0);
  for (double x : s.v) CHECK(x == 0.0);
  CHECK_THROWS_AS(step(g, WaveState::zero(g), a, nullptr, 1.01 * g.max_stable_dt()), CflError);
}

TEST_CASE("modal exactness is second order") {
  for (ModeIndex m : {ModeIndex{0, 0}, ModeIndex{1, 0}, ModeIndex{1, 1}}) {
    const double e33 = modal_error(33, m, 2.0);
    const double e65 = modal_error(65, m, 2.0);
    CHECK(std::log2(e33 / e65) >= 1.9);
  }
}

TEST_CASE("energy of modal data") {
  const Grid2D g(129);
  const auto e00 = energy(g, {mode_field(g, {0, 0}), Field(g.size(), 0.0), 0.0});
  CHECK(e00 == doctest::Approx(oracle::pi * oracle::pi / 4).epsilon(1e-3));
  const auto e10 = energy(g, {mode_field(g, {1, 0}), Field(g.size(), 0.0), 0.0});
  CHECK(e10 == doctest::Approx(5 * oracle::pi * oracle::pi / 4).epsilon(1e-3));
  CHECK(energy(g, WaveState::zero(g)) == 0.0);
}

TEST_CASE("undamped energy is conserved and damped energy never rises") {
  const Grid2D g(129);
  const Field phi = mode_field(g, {0, 0});
  const Field zero(g.size(), 0.0);
  const auto free = solve(g, phi, zero, DampingPair::zero(g.n()), nullptr, 4.0);
  double drift = 0.0;
  for (double e : free.energy) drift = std::max(drift, std::abs(e - free.energy[0]) / free.energy[0]);
  CHECK(drift <= 1e-3);

  const Grid2D c(33);
  for (double level : {0.1, 1.0, 5.0}) {
    const DampingPair a(SampledFunction1D::sample([&](double s) { return level * (1 + s); }, 33),
                        SampledFunction1D::sample([&](double s) { return level * (1 + s * s); }, 33));
    const auto r = solve(c, mode_field(c, {1, 0}), Field(c.size(), 0.0), a, nullptr, 3.0);
    for (std::size_t k = 1; k < r.staggered_energy.size(); ++k) {
      CHECK(r.staggered_energy[k] <= r.staggered_energy[k - 1]);
    }
  }

  const auto damped = solve(c, mode_field(c, {0, 0}), Field(c.size(), 0.0), DampingPair::constant(1.0, 33),
                            nullptr, 1.0);
  CHECK(damped.energy.back() < damped.energy.front());
}

TEST_CASE("solve from rest produces nothing") {
  const Grid2D g(17);
  const Field zero(g.size(), 0.0);
  const auto r = solve(g, zero, zero, DampingPair::constant(0.7, 17), nullptr, 1.0);
  CHECK(r.trace.l2_norm() == 0.0);
  for (double e : r.energy) CHECK(e == 0.0);
  for (double x : r.final.u) CHECK(x == 0.0);
}

TEST_CASE("undamped modal trace vanishes at second order") {
  auto trace_norm = [](std::size_t n) {
    const Grid2D g(n);
    return solve(g, mode_field(g, {0, 0}), Field(g.size(), 0.0), DampingPair::zero(n), nullptr, 2.0)
        .trace.l2_norm();
  };
  const double t33 = trace_norm(33), t65 = trace_norm(65);
  CHECK(t33 < 1e-2);
  CHECK(t33 / t65 > 3.5);
}

TEST_CASE("damped trace: nonzero, consistent with the boundary condition, resolution stable") {
  auto run = [](std::size_t n) {
    const Grid2D g(n);
    return solve(g, mode_field(g, {0, 0}), Field(g.size(), 0.0), DampingPair::constant(0.1, n), nullptr, 4.0);
  };
  const auto r33 = run(33), r65 = run(65);
  CHECK(r65.trace.l2_norm() > 0.1);
  CHECK(r65.trace.l2_norm() == doctest::Approx(r33.trace.l2_norm()).epsilon(2e-2));
  CHECK(r65.trace.consistency_gap() < r33.trace.consistency_gap());
}

TEST_CASE("dissipation identity") {
  auto residual = [](std::size_t n, double level) {
    const Grid2D g(n);
    const auto a = DampingPair::constant(level, n);
    return dissipation_residual(solve(g, mode_field(g, {0, 0}), Field(g.size(), 0.0), a, nullptr, 1.0), g, a);
  };
  CHECK(residual(33, 0.0) < 1e-2);
  const double r33 = residual(33, 1.0), r65 = residual(65, 1.0);
  CHECK(r65 < 1e-2);
  CHECK(r33 / r65 > 3.5);
  const Grid2D g(17);
  const Field zero(g.size(), 0.0);
  const auto a = DampingPair::constant(1.0, 17);
  CHECK(dissipation_residual(solve(g, zero, zero, a, nullptr, 0.5), g, a) == 0.0);
}

TEST_CASE("Rellich identity") {
  const std::pair<double, double> x0{1.25, 1.25};
  const Grid2D g(33);
  const auto lin = rellich_residual(g, sample_field(g, [](double x, double) { return x; }), x0);
  CHECK(lin.residual <= 1e-8 * lin.scale);
  const auto cst = rellich_residual(g, Field(g.size(), 1.0), x0);
  CHECK(cst.residual <= 1e-8);

  double prev = 1e300;
  for (std::size_t n : {33, 65, 129}) {
    const Grid2D gn(n);
    const auto r = rellich_residual(gn, mode_field(gn, {0, 0}), x0);
    CHECK(r.residual < prev);
    prev = r.residual;
  }
}

TEST_CASE("Riesz representative and dual norm") {
  const Grid2D g(33);
  const auto zero = riesz_solve(g, DualFunctional{Field(g.size(), 0.0)});
  CHECK(zero.vprime_norm == 0.0);

  const Field phi = mode_field(g, {0, 0});
  const auto r = riesz_solve(g, stiffness_functional(g, phi));
  for (std::size_t p = 0; p < phi.size(); ++p) CHECK(r.z[p] == doctest::Approx(phi[p]).epsilon(1e-6));
  CHECK(r.vprime_norm == doctest::Approx(std::sqrt(oracle::lambda(0, 0))).epsilon(1e-2));

  // w(psi) <= ||w|| ||grad psi|| with equality at the representative.
  const DualFunctional w = l2_functional(g, mode_field(g, {1, 2}));
  const auto rw = riesz_solve(g, w);
  const WaveOperator op(g, DampingPair::zero(g.n()));
  std::mt19937_64 rng(3);
  std::normal_distribution<double> nd;
  for (int t = 0; t < 20; ++t) {
    Field psi(g.size());
    for (std::size_t j = 0; j < g.n(); ++j) {
      for (std::size_t i = 0; i < g.n(); ++i) psi[g.index(i, j)] = g.dirichlet(i, j) ? 0.0 : nd(rng);
    }
    CHECK(w.apply(psi) <= rw.vprime_norm * std::sqrt(op.stiffness_form(psi, psi)) * (1 + 1e-12));
  }
  CHECK(w.apply(rw.z) == doctest::Approx(rw.vprime_norm * std::sqrt(op.stiffness_form(rw.z, rw.z))).epsilon(1e-6));

  auto boundary_norm = [](std::size_t n) {
    const Grid2D gn(n);
    return riesz_solve(gn, boundary_mode_functional(gn, DampingPair::constant(0.1, n), {0, 0})).vprime_norm;
  };
  const double b33 = boundary_norm(33), b65 = boundary_norm(65);
  CHECK(b65 > 0.0);
  CHECK(std::abs(b65 - b33) <= 0.02 * b65);
}

TEST_CASE("trace persistence round-trips bit-exactly") {
  const Grid2D g(17);
  const auto r = solve(g, mode_field(g, {1, 0}), Field(g.size(), 0.0), DampingPair::constant(0.3, 17), nullptr, 0.5);
  for (int side : {0, 1}) {
    std::stringstream ss;
    write_trace_csv(ss, r.trace, side);
    CHECK(ss.str().rfind("t,i,value\n", 0) == 0);
    const auto back = read_trace_csv(ss, r.trace.n, r.trace.steps);
    CHECK(back == (side == 0 ? r.trace.normal11 : r.trace.normal12));
  }
  std::stringstream bin;
  write_trace_binary(bin, r.trace);
  const auto back = read_trace_binary(bin);
  CHECK(back.n == r.trace.n);
  CHECK(back.steps == r.trace.steps);
  CHECK(back.dt == r.trace.dt);
  CHECK(back.normal11 == r.trace.normal11);
  CHECK(back.normal12 == r.trace.normal12);
}
