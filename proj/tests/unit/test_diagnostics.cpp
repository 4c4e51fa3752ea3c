#include "doctest.h"

#include <cmath>
#include <sstream>

#include "dampinv/diagnostics.hpp"
#include "dampinv/error.hpp"

using namespace dampinv;

TEST_CASE("decay fit on exact exponential data") {
  std::vector<double> t, e;
  const double omega = 0.37, e0 = 3.0;
  for (int i = 0; i <= 400; ++i) {
    t.push_back(0.02 * i);
    e.push_back(e0 * std::exp(-2 * omega * t.back()));
  }
  const auto f = fit_decay(t, e);
  CHECK(f.omega_fit == doctest::Approx(omega).epsilon(1e-12));
  // M is relative to the initial amplitude, so exact exponential data gives 1.
  CHECK(f.M_fit == doctest::Approx(1.0).epsilon(1e-10));
  CHECK(f.residual < 1e-12);
  CHECK(f.samples == 361);
}

TEST_CASE("decay fit input validation") {
  CHECK_THROWS_AS(fit_decay(std::vector<double>{0, 1, 2, 3}, std::vector<double>{1, 0, 1, 1}), InvalidArgument);
  CHECK_THROWS_AS(fit_decay(std::vector<double>{0, 1}, std::vector<double>{1, 1}), InvalidArgument);
}

TEST_CASE("decay rates of simulated trajectories") {
  const Grid2D g(33);
  const Field phi = mode_field(g, {0, 0});
  const Field zero(g.size(), 0.0);
  const auto free = solve(g, phi, zero, DampingPair::zero(g.n()), nullptr, 8.0);
  CHECK(std::abs(fit_decay(free.times, free.energy).omega_fit) < 1e-3);

  const auto damped = solve(g, phi, zero, DampingPair::constant(1.0, g.n()), nullptr, 8.0);
  CHECK(fit_decay(damped.times, damped.energy).omega_fit > 0.0);

  // The damped boundary condition is incompatible with the initial data at
  // second order, so the fitted rate converges slowly: n = 65 and 129 differ
  // by about 6 percent.
  auto rate = [](std::size_t n) {
    const Grid2D gn(n);
    const auto r = solve(gn, mode_field(gn, {0, 0}), Field(gn.size(), 0.0), DampingPair::constant(1.0, n), nullptr, 8.0);
    return fit_decay(r.times, r.energy).omega_fit;
  };
  CHECK(rate(65) == doctest::Approx(rate(129)).epsilon(0.1));
}

TEST_CASE("observability estimate") {
  const Grid2D g(33);
  const auto ps = probe_set(2);
  CHECK(ps.size() == 9);
  CHECK(ps.front() == ModeIndex{0, 0});
  CHECK(ps.back() == ModeIndex{2, 2});

  CHECK_THROWS_AS(estimate_observability(g, DampingPair::zero(g.n()), 4.0, ps), ObservabilityError);

  const auto a = DampingPair::constant(1.0, g.n());
  const std::vector<ModeIndex> one{{0, 0}};
  const auto r4 = estimate_observability(g, a, 4.0, one);
  CHECK(std::isfinite(r4.kappa_est));
  CHECK(r4.kappa_est > 0.0);
  CHECK(r4.ratios.size() == 1);

  const auto full4 = estimate_observability(g, a, 4.0, ps);
  const auto full8 = estimate_observability(g, a, 8.0, ps);
  CHECK(full8.kappa_est <= full4.kappa_est);
  double mx = 0.0;
  for (const auto& m : full4.ratios) mx = std::max(mx, m.ratio);
  CHECK(full4.kappa_est == mx);

  std::ostringstream csv;
  write_observability_csv(csv, full4);
  CHECK(csv.str().rfind("mode_k,mode_l,ratio\n", 0) == 0);
  const auto json = observability_summary_json(full4);
  CHECK(json.find("\"kappa_est\"") != std::string::npos);
  CHECK(json.find("\"n\"") != std::string::npos);
}
