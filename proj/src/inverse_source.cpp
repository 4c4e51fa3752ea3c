#include "dampinv/inverse_source.hpp"

#include <cmath>
#include <string>

#include "dampinv/error.hpp"

namespace dampinv {

namespace {

void require_compatible(const Modulation& lam, const TimeSignal& h) {
  if (lam.steps() != h.steps()) {
    throw InvalidArgument("modulation has " + std::to_string(lam.steps()) +
                          " steps, signal has " + std::to_string(h.steps()));
  }
  if (std::abs(lam.dt() - h.dt()) > 1e-12 * h.dt()) {
    throw InvalidArgument("modulation and signal time steps differ");
  }
}

}  // namespace

TimeSignal convolve_S(const Modulation& lam, const TimeSignal& h) {
  require_compatible(lam, h);
  const std::size_t steps = h.steps();
  const std::size_t dim = h.dim();
  const double dt = h.dt();
  TimeSignal out(steps, dim, dt);
  for (std::size_t n = 1; n <= steps; ++n) {
    for (std::size_t c = 0; c < dim; ++c) {
      double acc = 0.5 * (lam[n] * h(0, c) + lam[0] * h(n, c));
      for (std::size_t m = 1; m < n; ++m) acc += lam[n - m] * h(m, c);
      out(n, c) = dt * acc;
    }
  }
  return out;
}

TimeSignal convolve_Sstar(const Modulation& lam, const TimeSignal& h) {
  require_compatible(lam, h);
  const std::size_t steps = h.steps();
  const std::size_t dim = h.dim();
  const double dt = h.dt();
  TimeSignal out(steps, dim, dt);
  for (std::size_t c = 0; c < dim; ++c) {
    out(steps, c) = 0.5 * dt * lam[0] * h(steps, c);
    for (std::size_t m = 1; m < steps; ++m) {
      double acc = 0.5 * (lam[0] * h(m, c) + lam[steps - m] * h(steps, c));
      for (std::size_t n = m + 1; n < steps; ++n) acc += lam[n - m] * h(n, c);
      out(m, c) = dt * acc;
    }
    double acc = 0.5 * lam[steps] * h(steps, c);
    for (std::size_t n = 1; n < steps; ++n) acc += lam[n] * h(n, c);
    out(0, c) = dt * acc;
  }
  return out;
}

double stability_factor(const Modulation& lam, double tau) {
  const double l0 = lam.lambda0();
  if (l0 == 0.0) throw InvalidArgument("stability_factor: modulation vanishes at t = 0");
  if (!(tau > 0.0)) throw InvalidArgument("stability_factor: tau must be positive");
  const double d = lam.hprime_l2();
  return std::sqrt(2.0) / std::abs(l0) * std::exp(d * d * tau / (l0 * l0));
}

BoundCheck gronwall_bound_check(const Modulation& lam, const TimeSignal& h, double rel_tol) {
  BoundCheck out;
  out.lhs = h.l2_norm();
  out.rhs = stability_factor(lam, h.tau()) * convolve_Sstar(lam, h).derivative().l2_norm();
  out.holds = out.lhs <= out.rhs * (1.0 + rel_tol);
  return out;
}

TimeSignal observe(const BoundaryTrace& tr) {
  const std::size_t n = tr.n;
  const double h = 1.0 / static_cast<double>(n - 1);
  std::vector<double> weight(n);
  for (std::size_t i = 0; i < n; ++i) weight[i] = std::sqrt(h * ((i == 0 || i == n - 1) ? 0.5 : 1.0));
  TimeSignal out(tr.steps, 2 * n, tr.dt);
  for (std::size_t s = 0; s <= tr.steps; ++s) {
    for (std::size_t i = 0; i < n; ++i) {
      out(s, i) = weight[i] * tr.normal11[s * n + i];
      out(s, n + i) = weight[i] * tr.normal12[s * n + i];
    }
  }
  return out;
}

TimeSignal free_response(const Grid2D& g, const DampingPair& a, const DualFunctional& w,
                         double tau, double dt_factor) {
  if (w.load.size() != g.size()) throw InvalidArgument("functional does not match the grid");
  const WaveOperator op(g, a);
  Field v0(g.size(), 0.0);
  for (std::size_t j = 0; j < g.n(); ++j) {
    for (std::size_t i = 0; i < g.n(); ++i) {
      const std::size_t p = g.index(i, j);
      if (!g.dirichlet(i, j)) v0[p] = w.load[p] / op.mass()[p];
    }
  }
  return observe(solve(g, Field(g.size(), 0.0), v0, a, nullptr, tau, dt_factor).trace);
}

TimeSignal apply_E(const Grid2D& g, const DampingPair& a, const DualFunctional& w,
                   const Modulation& lam, double tau, double dt_factor) {
  return convolve_S(lam, free_response(g, a, w, tau, dt_factor));
}

TimeSignal sourced_response(const Grid2D& g, const DampingPair& a, const SourceSpec& src,
                            double tau, double dt_factor) {
  const Field zero(g.size(), 0.0);
  return observe(solve(g, zero, zero, a, &src, tau, dt_factor).trace);
}

SourceBoundResult check_source_bound(const Grid2D& g, const DampingPair& a, const SourceSpec& src,
                          double tau, double dt_factor) {
  SourceBoundResult out;
  out.factor = stability_factor(src.modulation, tau);
  out.wnorm = riesz_solve(g, src.functional).vprime_norm;
  const Field zero(g.size(), 0.0);
  out.trace_norm = solve(g, zero, zero, a, &src, tau, dt_factor).trace.l2_norm();
  if (out.wnorm == 0.0) return out;
  if (!(out.trace_norm > 0.0)) {
    throw ObservabilityError("check_source_bound: nonzero source produced a zero boundary trace");
  }
  out.ratio = out.wnorm / out.trace_norm;
  out.c_emp = out.ratio / out.factor;
  return out;
}

}  // namespace dampinv
