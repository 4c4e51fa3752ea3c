#include "dampinv/wave.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <istream>
#include <numbers>
#include <ostream>
#include <string>

#include "dampinv/csv.hpp"
#include "dampinv/error.hpp"

namespace dampinv {

namespace {

// Trapezoid end factor along one grid line.
inline double end_factor(std::size_t i, std::size_t n) { return (i == 0 || i == n - 1) ? 0.5 : 1.0; }

}  // namespace

// ---------------------------------------------------------------------------
// Grid

Grid2D::Grid2D(std::size_t n) : n_(n), h_(n > 1 ? 1.0 / static_cast<double>(n - 1) : 0.0) {
  if (n < kMinNodes) {
    throw InvalidArgument("grid needs n >= " + std::to_string(kMinNodes) + " nodes per side, got " +
                          std::to_string(n));
  }
}

double Grid2D::max_stable_dt() const { return h_ / std::numbers::sqrt2; }

double Grid2D::default_dt(double dt_factor) const { return dt_factor * max_stable_dt(); }

Field mode_field(const Grid2D& g, ModeIndex mode) {
  Field f = sample_field(g, [&](double x, double y) { return eval_phi2d(mode, x, y); });
  for (std::size_t k = 0; k < g.n(); ++k) {
    f[g.index(g.n() - 1, k)] = 0.0;
    f[g.index(k, g.n() - 1)] = 0.0;
  }
  return f;
}

// ---------------------------------------------------------------------------
// Functionals and sources

double DualFunctional::apply(std::span<const double> psi) const {
  double acc = 0.0;
  for (std::size_t p = 0; p < load.size(); ++p) acc += load[p] * psi[p];
  return acc;
}

DualFunctional DualFunctional::scaled(double c) const {
  DualFunctional out{load};
  for (double& v : out.load) v *= c;
  return out;
}

DualFunctional operator+(const DualFunctional& a, const DualFunctional& b) {
  if (a.load.size() != b.load.size()) throw InvalidArgument("functional sizes differ");
  DualFunctional out{a.load};
  for (std::size_t p = 0; p < out.load.size(); ++p) out.load[p] += b.load[p];
  return out;
}

DualFunctional l2_functional(const Grid2D& g, const Field& f) {
  const WaveOperator op(g, DampingPair::zero(3));
  DualFunctional out{Field(g.size(), 0.0)};
  for (std::size_t p = 0; p < g.size(); ++p) out.load[p] = op.mass()[p] * f[p];
  return out;
}

DualFunctional stiffness_functional(const Grid2D& g, const Field& f) {
  const WaveOperator op(g, DampingPair::zero(3));
  DualFunctional out{Field(g.size(), 0.0)};
  op.apply_stiffness(f, out.load);
  return out;
}

DualFunctional boundary_mode_functional(const Grid2D& g, const DampingPair& a, ModeIndex mode) {
  const WaveOperator op(g, a);
  const double root = eigenpair(mode).omega;
  const Field phi = mode_field(g, mode);
  DualFunctional out{Field(g.size(), 0.0)};
  for (std::size_t p = 0; p < g.size(); ++p) out.load[p] = -root * op.damping()[p] * phi[p];
  return out;
}

SourceSpec SourceSpec::l2(const Grid2D& g, const Field& w, Modulation lam) {
  return {std::move(lam), l2_functional(g, w), std::nullopt};
}

SourceSpec SourceSpec::boundary_mode(const Grid2D& g, const DampingPair& a, ModeIndex mode,
                                     Modulation lam) {
  return {std::move(lam), boundary_mode_functional(g, a, mode), BoundarySourceTag{a, mode}};
}

SourceSpec SourceSpec::scaled(double c) const { return {modulation, functional.scaled(c), boundary}; }

// ---------------------------------------------------------------------------
// Trace

BoundaryTrace BoundaryTrace::zeros(std::size_t n, std::size_t steps, double dt) {
  BoundaryTrace tr;
  tr.n = n;
  tr.steps = steps;
  tr.dt = dt;
  const std::size_t sz = n * (steps + 1);
  for (auto* ch : {&tr.normal11, &tr.normal12, &tr.flux11, &tr.flux12, &tr.velocity11,
                   &tr.velocity12}) {
    ch->assign(sz, 0.0);
  }
  return tr;
}

double BoundaryTrace::l2_norm() const {
  const double h = 1.0 / static_cast<double>(n - 1);
  double acc = 0.0;
  for (std::size_t s = 0; s <= steps; ++s) {
    const double wt = end_factor(s, steps + 1) * dt;
    double row = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double a = normal11[s * n + i];
      const double b = normal12[s * n + i];
      row += end_factor(i, n) * h * (a * a + b * b);
    }
    acc += wt * row;
  }
  return std::sqrt(acc);
}

BoundaryTrace BoundaryTrace::minus(const BoundaryTrace& other) const {
  if (other.n != n || other.steps != steps) throw InvalidArgument("trace shapes differ");
  BoundaryTrace out = *this;
  auto sub = [](std::vector<double>& x, const std::vector<double>& y) {
    if (x.size() != y.size()) return;
    for (std::size_t k = 0; k < x.size(); ++k) x[k] -= y[k];
  };
  sub(out.normal11, other.normal11);
  sub(out.normal12, other.normal12);
  sub(out.flux11, other.flux11);
  sub(out.flux12, other.flux12);
  sub(out.velocity11, other.velocity11);
  sub(out.velocity12, other.velocity12);
  return out;
}

double BoundaryTrace::consistency_gap() const {
  double gap = 0.0;
  for (std::size_t k = 0; k < normal11.size(); ++k) {
    gap = std::max({gap, std::abs(normal11[k] - flux11[k]), std::abs(normal12[k] - flux12[k])});
  }
  return gap;
}

// ---------------------------------------------------------------------------
// Operator

WaveOperator::WaveOperator(const Grid2D& g, const DampingPair& a)
    : grid_(g), mass_(g.size(), 0.0), damping_(g.size(), 0.0), a11_(g.n()), a12_(g.n()) {
  const std::size_t n = g.n();
  const double h = g.h();
  for (std::size_t j = 0; j < n; ++j) {
    for (std::size_t i = 0; i < n; ++i) {
      mass_[g.index(i, j)] = h * h * end_factor(i, n) * end_factor(j, n);
    }
  }
  for (std::size_t i = 0; i < n; ++i) {
    a11_[i] = a.a1().at(g.coord(i));
    a12_[i] = a.a2().at(g.coord(i));
  }
  for (std::size_t i = 0; i + 1 < n; ++i) {
    damping_[g.index(i, 0)] += a11_[i] * h * end_factor(i, n);
    damping_[g.index(0, i)] += a12_[i] * h * end_factor(i, n);
  }
}

void WaveOperator::apply_stiffness(std::span<const double> u, std::span<double> out) const {
  const std::size_t n = grid_.n();
  std::fill(out.begin(), out.end(), 0.0);
  for (std::size_t j = 0; j + 1 < n; ++j) {
    const double cx = j == 0 ? 0.5 : 1.0;
    for (std::size_t i = 0; i + 1 < n; ++i) {
      const double cy = i == 0 ? 0.5 : 1.0;
      const std::size_t p = j * n + i;
      const double up = u[p];
      double acc = cx * (up - u[p + 1]) + cy * (up - u[p + n]);
      if (i > 0) acc += cx * (up - u[p - 1]);
      if (j > 0) acc += cy * (up - u[p - n]);
      out[p] = acc;
    }
  }
}

double WaveOperator::stiffness_form(std::span<const double> u, std::span<const double> w) const {
  const std::size_t n = grid_.n();
  double acc = 0.0;
  for (std::size_t j = 0; j < n; ++j) {
    const double cx = end_factor(j, n);
    for (std::size_t i = 0; i + 1 < n; ++i) {
      const std::size_t p = j * n + i;
      acc += cx * (u[p + 1] - u[p]) * (w[p + 1] - w[p]);
    }
  }
  for (std::size_t j = 0; j + 1 < n; ++j) {
    for (std::size_t i = 0; i < n; ++i) {
      const double cy = end_factor(i, n);
      const std::size_t p = j * n + i;
      acc += cy * (u[p + n] - u[p]) * (w[p + n] - w[p]);
    }
  }
  return acc;
}

double WaveOperator::mass_form(std::span<const double> u, std::span<const double> w) const {
  double acc = 0.0;
  for (std::size_t p = 0; p < mass_.size(); ++p) acc += mass_[p] * u[p] * w[p];
  return acc;
}

// ---------------------------------------------------------------------------
// Time stepping

namespace {

void check_dt(const Grid2D& g, double dt) {
  if (!(dt > 0.0)) throw InvalidArgument("time step must be positive");
  if (dt > g.max_stable_dt() * (1.0 + 1e-12)) {
    throw CflError("time step " + std::to_string(dt) + " exceeds the stability bound h/sqrt(2) = " +
                   std::to_string(g.max_stable_dt()));
  }
}

// Kick-drift-kick update in place. Caches K u between steps so every step
// costs a single stiffness application.
class Stepper {
 public:
  Stepper(const WaveOperator& op, const SourceSpec* source, double dt)
      : op_(op), source_(source), dt_(dt), ku_(op.grid().size()), ku_next_(op.grid().size()),
        vh_(op.grid().size()), inv_lhs_(op.grid().size(), 0.0), free_(op.grid().size(), 0) {
    const Grid2D& g = op.grid();
    for (std::size_t j = 0; j < g.n(); ++j) {
      for (std::size_t i = 0; i < g.n(); ++i) {
        const std::size_t p = g.index(i, j);
        if (g.dirichlet(i, j)) continue;
        free_[p] = 1;
        inv_lhs_[p] = 1.0 / (op.mass()[p] + 0.5 * dt * op.damping()[p]);
      }
    }
    if (source_ != nullptr && source_->functional.load.size() != g.size()) {
      throw InvalidArgument("source functional does not match the grid");
    }
  }

  void prime(const WaveState& s) { op_.apply_stiffness(s.u, ku_); }

  /// Advances `s` by one step; returns the leapfrog energy at the half step.
  double advance(WaveState& s) {
    const auto mass = op_.mass();
    const auto damp = op_.damping();
    const double half = 0.5 * dt_;
    const double f0 = source_ ? source_->modulation.at(s.t) : 0.0;
    const double f1 = source_ ? source_->modulation.at(s.t + dt_) : 0.0;
    const double* load = source_ ? source_->functional.load.data() : nullptr;

    double kinetic = 0.0;
    double cross = 0.0;
    for (std::size_t p = 0; p < s.u.size(); ++p) {
      if (!free_[p]) continue;
      double force = -ku_[p] - damp[p] * s.v[p];
      if (load) force += f0 * load[p];
      vh_[p] = s.v[p] + half * force / mass[p];
      s.u[p] += dt_ * vh_[p];
      kinetic += mass[p] * vh_[p] * vh_[p];
      cross += s.u[p] * ku_[p];
    }
    const double staggered = 0.5 * (kinetic + cross);
    if (!std::isfinite(staggered)) {
      throw NumericalError("non-finite field values at t = " + std::to_string(s.t));
    }

    op_.apply_stiffness(s.u, ku_next_);
    std::swap(ku_, ku_next_);
    for (std::size_t p = 0; p < s.u.size(); ++p) {
      if (!free_[p]) continue;
      double rhs = mass[p] * vh_[p] - half * ku_[p];
      if (load) rhs += half * f1 * load[p];
      s.v[p] = rhs * inv_lhs_[p];
    }
    s.t += dt_;
    return staggered;
  }

 private:
  const WaveOperator& op_;
  const SourceSpec* source_;
  double dt_;
  Field ku_;
  Field ku_next_;
  Field vh_;
  std::vector<double> inv_lhs_;
  std::vector<char> free_;
};

void record_trace(const WaveOperator& op, const WaveState& s, std::size_t step, BoundaryTrace& tr) {
  const Grid2D& g = op.grid();
  const std::size_t n = g.n();
  const double inv2h = 1.0 / (2.0 * g.h());
  const auto a11 = op.side_damping(0);
  const auto a12 = op.side_damping(1);
  const std::size_t row = step * n;
  for (std::size_t i = 0; i < n; ++i) {
    // Outward normal on y = 0 is -e_y, on x = 0 it is -e_x.
    const double u0 = s.u[g.index(i, 0)], u1 = s.u[g.index(i, 1)], u2 = s.u[g.index(i, 2)];
    tr.normal11[row + i] = (3.0 * u0 - 4.0 * u1 + u2) * inv2h;
    tr.velocity11[row + i] = s.v[g.index(i, 0)];
    tr.flux11[row + i] = -a11[i] * s.v[g.index(i, 0)];

    const double w0 = s.u[g.index(0, i)], w1 = s.u[g.index(1, i)], w2 = s.u[g.index(2, i)];
    tr.normal12[row + i] = (3.0 * w0 - 4.0 * w1 + w2) * inv2h;
    tr.velocity12[row + i] = s.v[g.index(0, i)];
    tr.flux12[row + i] = -a12[i] * s.v[g.index(0, i)];
  }
}

void require_dirichlet_zero(const Grid2D& g, const Field& f, const char* what) {
  if (f.size() != g.size()) {
    throw InvalidArgument(std::string(what) + " has " + std::to_string(f.size()) +
                          " values, grid needs " + std::to_string(g.size()));
  }
  double scale = 0.0;
  for (double v : f) scale = std::max(scale, std::abs(v));
  for (std::size_t k = 0; k < g.n(); ++k) {
    const double e1 = std::abs(f[g.index(g.n() - 1, k)]);
    const double e2 = std::abs(f[g.index(k, g.n() - 1)]);
    if (std::max(e1, e2) > 1e-12 * std::max(scale, 1.0)) {
      throw InvalidArgument(std::string(what) + " must vanish on the Dirichlet sides");
    }
  }
}

Field pin_dirichlet(const Grid2D& g, Field f) {
  for (std::size_t k = 0; k < g.n(); ++k) {
    f[g.index(g.n() - 1, k)] = 0.0;
    f[g.index(k, g.n() - 1)] = 0.0;
  }
  return f;
}

}  // namespace

WaveState step(const Grid2D& g, const WaveState& state, const DampingPair& a,
               const SourceSpec* source, double dt) {
  check_dt(g, dt);
  require_dirichlet_zero(g, state.u, "state.u");
  const WaveOperator op(g, a);
  Stepper stepper(op, source, dt);
  WaveState next = state;
  stepper.prime(next);
  stepper.advance(next);
  for (double v : next.v) {
    if (!std::isfinite(v)) throw NumericalError("non-finite velocity after step");
  }
  return next;
}

std::size_t step_count(const Grid2D& g, double tau, double dt_factor) {
  if (!(tau > 0.0)) throw InvalidArgument("horizon tau must be positive");
  if (!(dt_factor > 0.0)) throw InvalidArgument("dt factor must be positive");
  const double nominal = g.default_dt(dt_factor);
  return static_cast<std::size_t>(std::ceil(tau / nominal - 1e-9));
}

SolveResult solve(const Grid2D& g, const Field& u0, const Field& u1, const DampingPair& a,
                  const SourceSpec* source, double tau, double dt_factor) {
  require_dirichlet_zero(g, u0, "u0");
  require_dirichlet_zero(g, u1, "u1");
  const std::size_t steps = step_count(g, tau, dt_factor);
  const double dt = tau / static_cast<double>(steps);
  check_dt(g, dt);

  const WaveOperator op(g, a);
  Stepper stepper(op, source, dt);

  SolveResult out;
  out.dt = dt;
  out.trace = BoundaryTrace::zeros(g.n(), steps, dt);
  out.times.reserve(steps + 1);
  out.energy.reserve(steps + 1);
  out.staggered_energy.reserve(steps);

  WaveState s{pin_dirichlet(g, u0), pin_dirichlet(g, u1), 0.0};
  stepper.prime(s);
  auto record = [&](std::size_t k) {
    out.times.push_back(static_cast<double>(k) * dt);
    out.energy.push_back(0.5 * (op.stiffness_form(s.u, s.u) + op.mass_form(s.v, s.v)));
    record_trace(op, s, k, out.trace);
  };
  record(0);
  for (std::size_t k = 1; k <= steps; ++k) {
    out.staggered_energy.push_back(stepper.advance(s));
    s.t = static_cast<double>(k) * dt;
    record(k);
  }
  out.final = std::move(s);
  return out;
}

double energy(const Grid2D& g, const WaveState& state) {
  const WaveOperator op(g, DampingPair::zero(3));
  return 0.5 * (op.stiffness_form(state.u, state.u) + op.mass_form(state.v, state.v));
}

double dissipation_residual(const SolveResult& traj, const Grid2D& g, const DampingPair& a) {
  const auto& tr = traj.trace;
  const std::size_t n = tr.n;
  if (n != g.n()) throw InvalidArgument("trajectory does not match the grid");
  const WaveOperator op(g, a);
  const auto a11 = op.side_damping(0);
  const auto a12 = op.side_damping(1);
  const double h = g.h();
  double worst = 0.0;
  for (std::size_t k = 1; k + 1 < traj.energy.size(); ++k) {
    const double dedt = (traj.energy[k + 1] - traj.energy[k - 1]) / (2.0 * tr.dt);
    double flux = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double v1 = tr.velocity11[k * n + i];
      const double v2 = tr.velocity12[k * n + i];
      flux += end_factor(i, n) * h * (a11[i] * v1 * v1 + a12[i] * v2 * v2);
    }
    worst = std::max(worst, std::abs(dedt + flux));
  }
  return worst;
}

// ---------------------------------------------------------------------------
// Rellich identity

RellichResult rellich_residual(const Grid2D& g, const Field& phi, std::pair<double, double> x0) {
  const std::size_t n = g.n();
  const double h = g.h();
  auto at = [&](std::size_t i, std::size_t j) { return phi[g.index(i, j)]; };

  // First and second derivatives along one index with second-order one-sided
  // formulas at the ends.
  auto d1 = [&](auto&& f, std::size_t i) {
    if (i == 0) return (-3.0 * f(0) + 4.0 * f(1) - f(2)) / (2.0 * h);
    if (i == n - 1) return (3.0 * f(n - 1) - 4.0 * f(n - 2) + f(n - 3)) / (2.0 * h);
    return (f(i + 1) - f(i - 1)) / (2.0 * h);
  };
  auto d2 = [&](auto&& f, std::size_t i) {
    if (i == 0) return (2.0 * f(0) - 5.0 * f(1) + 4.0 * f(2) - f(3)) / (h * h);
    if (i == n - 1) return (2.0 * f(n - 1) - 5.0 * f(n - 2) + 4.0 * f(n - 3) - f(n - 4)) / (h * h);
    return (f(i + 1) - 2.0 * f(i) + f(i - 1)) / (h * h);
  };

  Field px(g.size()), py(g.size()), lap(g.size());
  for (std::size_t j = 0; j < n; ++j) {
    for (std::size_t i = 0; i < n; ++i) {
      auto row = [&](std::size_t k) { return at(k, j); };
      auto col = [&](std::size_t k) { return at(i, k); };
      const std::size_t p = g.index(i, j);
      px[p] = d1(row, i);
      py[p] = d1(col, j);
      lap[p] = d2(row, i) + d2(col, j);
    }
  }

  const auto [cx, cy] = x0;
  double lhs = 0.0;
  for (std::size_t j = 0; j < n; ++j) {
    for (std::size_t i = 0; i < n; ++i) {
      const std::size_t p = g.index(i, j);
      const double mdot = (g.coord(i) - cx) * px[p] + (g.coord(j) - cy) * py[p];
      lhs += h * h * end_factor(i, n) * end_factor(j, n) * 2.0 * lap[p] * mdot;
    }
  }

  // Boundary terms, side by side with their outward normals.
  double flux_term = 0.0;
  double energy_term = 0.0;
  struct SideDef {
    bool vertical;  // side is x = const
    std::size_t fixed;
    double nx, ny;
  };
  const SideDef sides[4] = {{true, 0, -1.0, 0.0},
                            {true, n - 1, 1.0, 0.0},
                            {false, 0, 0.0, -1.0},
                            {false, n - 1, 0.0, 1.0}};
  for (const auto& sd : sides) {
    for (std::size_t k = 0; k < n; ++k) {
      const std::size_t i = sd.vertical ? sd.fixed : k;
      const std::size_t j = sd.vertical ? k : sd.fixed;
      const std::size_t p = g.index(i, j);
      const double mx = g.coord(i) - cx, my = g.coord(j) - cy;
      const double dnu = sd.nx * px[p] + sd.ny * py[p];
      const double mdot = mx * px[p] + my * py[p];
      const double mnu = mx * sd.nx + my * sd.ny;
      const double w = h * end_factor(k, n);
      flux_term += w * 2.0 * dnu * mdot;
      energy_term += w * mnu * (px[p] * px[p] + py[p] * py[p]);
    }
  }
  RellichResult r;
  r.lhs = lhs;
  r.rhs = flux_term - energy_term;
  r.residual = std::abs(r.lhs - r.rhs);
  r.scale = std::abs(lhs) + std::abs(flux_term) + std::abs(energy_term);
  return r;
}

// ---------------------------------------------------------------------------
// Riesz representative

RieszResult riesz_solve(const Grid2D& g, const DualFunctional& w, double rel_tol, int max_iter) {
  if (w.load.size() != g.size()) throw InvalidArgument("functional does not match the grid");
  const WaveOperator op(g, DampingPair::zero(3));
  const std::size_t sz = g.size();
  std::vector<char> free(sz, 0);
  for (std::size_t j = 0; j < g.n(); ++j) {
    for (std::size_t i = 0; i < g.n(); ++i) free[g.index(i, j)] = g.dirichlet(i, j) ? 0 : 1;
  }
  if (max_iter <= 0) max_iter = static_cast<int>(10 * sz);

  RieszResult out;
  out.z.assign(sz, 0.0);
  Field r(sz, 0.0), p(sz, 0.0), kp(sz, 0.0);
  double bnorm = 0.0;
  for (std::size_t q = 0; q < sz; ++q) {
    if (free[q]) r[q] = w.load[q];
    bnorm += r[q] * r[q];
  }
  bnorm = std::sqrt(bnorm);
  if (bnorm == 0.0) return out;

  p = r;
  double rr = bnorm * bnorm;
  for (int it = 1; it <= max_iter; ++it) {
    op.apply_stiffness(p, kp);
    double pkp = 0.0;
    for (std::size_t q = 0; q < sz; ++q) pkp += p[q] * kp[q];
    const double alpha = rr / pkp;
    double rr_new = 0.0;
    for (std::size_t q = 0; q < sz; ++q) {
      out.z[q] += alpha * p[q];
      r[q] -= alpha * kp[q];
      rr_new += r[q] * r[q];
    }
    out.iterations = it;
    if (std::sqrt(rr_new) <= rel_tol * bnorm) {
      out.vprime_norm = std::sqrt(std::max(0.0, op.stiffness_form(out.z, out.z)));
      return out;
    }
    const double beta = rr_new / rr;
    rr = rr_new;
    for (std::size_t q = 0; q < sz; ++q) p[q] = r[q] + beta * p[q];
  }
  throw ConvergenceError("riesz_solve: CG did not converge in " + std::to_string(max_iter) +
                         " iterations");
}

// ---------------------------------------------------------------------------
// Persistence

void write_trace_csv(std::ostream& os, const BoundaryTrace& tr, int side) {
  const auto& ch = side == 0 ? tr.normal11 : tr.normal12;
  os << "t,i,value\n";
  for (std::size_t s = 0; s <= tr.steps; ++s) {
    const std::string t = csv::format(static_cast<double>(s) * tr.dt);
    for (std::size_t i = 0; i < tr.n; ++i) {
      os << t << ',' << i << ',' << csv::format(ch[s * tr.n + i]) << '\n';
    }
  }
}

std::vector<double> read_trace_csv(std::istream& is, std::size_t n, std::size_t steps) {
  std::string line;
  if (!std::getline(is, line) || line.rfind("t,i,value", 0) != 0) {
    throw InvalidArgument("trace csv: missing header");
  }
  std::vector<double> out(n * (steps + 1), 0.0);
  std::size_t count = 0;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    const auto cols = csv::split(line);
    if (cols.size() != 3) throw InvalidArgument("trace csv: expected 3 columns");
    if (count >= out.size()) throw InvalidArgument("trace csv: too many rows");
    const auto i = static_cast<std::size_t>(csv::parse_double(cols[1]));
    if (i != count % n) throw InvalidArgument("trace csv: rows out of order");
    out[count++] = csv::parse_double(cols[2]);
  }
  if (count != out.size()) throw InvalidArgument("trace csv: too few rows");
  return out;
}

void write_trace_binary(std::ostream& os, const BoundaryTrace& tr) {
  const std::uint64_t n = tr.n, steps = tr.steps, sides = 2;
  const double dt = tr.dt;
  os.write(reinterpret_cast<const char*>(&n), sizeof n);
  os.write(reinterpret_cast<const char*>(&steps), sizeof steps);
  os.write(reinterpret_cast<const char*>(&dt), sizeof dt);
  os.write(reinterpret_cast<const char*>(&sides), sizeof sides);
  for (const auto* ch : {&tr.normal11, &tr.normal12}) {
    os.write(reinterpret_cast<const char*>(ch->data()),
             static_cast<std::streamsize>(ch->size() * sizeof(double)));
  }
}

BoundaryTrace read_trace_binary(std::istream& is) {
  std::uint64_t n = 0, steps = 0, sides = 0;
  double dt = 0.0;
  is.read(reinterpret_cast<char*>(&n), sizeof n);
  is.read(reinterpret_cast<char*>(&steps), sizeof steps);
  is.read(reinterpret_cast<char*>(&dt), sizeof dt);
  is.read(reinterpret_cast<char*>(&sides), sizeof sides);
  if (!is || sides != 2 || n < 3) throw InvalidArgument("trace dump: bad header");
  BoundaryTrace tr;
  tr.n = n;
  tr.steps = steps;
  tr.dt = dt;
  for (auto* ch : {&tr.normal11, &tr.normal12}) {
    ch->resize(n * (steps + 1));
    is.read(reinterpret_cast<char*>(ch->data()),
            static_cast<std::streamsize>(ch->size() * sizeof(double)));
  }
  if (!is) throw InvalidArgument("trace dump: truncated payload");
  return tr;
}

void write_field_csv(std::ostream& os, const Field& f, double t) {
  os << "t,i,value\n";
  const std::string ts = csv::format(t);
  for (std::size_t p = 0; p < f.size(); ++p) os << ts << ',' << p << ',' << csv::format(f[p]) << '\n';
}

}  // namespace dampinv
