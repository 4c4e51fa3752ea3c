#pragma once

// Finite-difference forward solver for the damped wave problem on the unit
// square:
//
//   u_tt - Laplace u = lambda(t) w     in (0,1)^2 x (0, tau)
//   u = 0                              on x = 1 and y = 1
//   d_nu u + a u_t = 0                 on y = 0 (a1) and x = 0 (a2)
//
// Space: 5-point Laplacian with ghost-node elimination on the damped sides.
// Equivalently, a lumped-mass system  M u'' + B u' + K u = f  with M the
// trapezoid mass, B the trapezoid boundary quadrature of a and K the edge-based
// stiffness. Time: leapfrog with centred boundary velocity, advanced as a
// kick-drift-kick one-step map on (u, v).

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "dampinv/signal.hpp"
#include "dampinv/spectral.hpp"

namespace dampinv {

/// Uniform (n x n)-node grid on the unit square. Node (i, j) sits at
/// (i h, j h); storage index is j n + i. Nodes with i = n-1 or j = n-1 are
/// Dirichlet; i = 0 or j = 0 (but not Dirichlet) are damped.
class Grid2D {
 public:
  static constexpr std::size_t kMinNodes = 17;

  explicit Grid2D(std::size_t n);

  std::size_t n() const { return n_; }
  double h() const { return h_; }
  std::size_t size() const { return n_ * n_; }
  std::size_t index(std::size_t i, std::size_t j) const { return j * n_ + i; }
  double coord(std::size_t i) const { return static_cast<double>(i) * h_; }
  bool dirichlet(std::size_t i, std::size_t j) const { return i == n_ - 1 || j == n_ - 1; }

  /// Stable default step dt_factor * h / sqrt(2); the scheme needs dt <= h / sqrt(2).
  double default_dt(double dt_factor = 0.5) const;
  double max_stable_dt() const;

 private:
  std::size_t n_;
  double h_;
};

using Field = std::vector<double>;

template <typename F>
Field sample_field(const Grid2D& g, F&& f) {
  Field out(g.size(), 0.0);
  for (std::size_t j = 0; j < g.n(); ++j) {
    for (std::size_t i = 0; i < g.n(); ++i) out[g.index(i, j)] = f(g.coord(i), g.coord(j));
  }
  return out;
}

/// phi_kl sampled on the grid (exactly zero on the Dirichlet sides).
Field mode_field(const Grid2D& g, ModeIndex mode);

struct WaveState {
  Field u;
  Field v;
  double t = 0.0;

  static WaveState zero(const Grid2D& g) { return {Field(g.size(), 0.0), Field(g.size(), 0.0), 0.0}; }
};

/// A bounded linear functional on the discrete space, stored as its values on
/// the nodal basis: load[p] = w(e_p). Dirichlet entries are ignored.
struct DualFunctional {
  Field load;

  double apply(std::span<const double> psi) const;
  DualFunctional scaled(double c) const;
  friend DualFunctional operator+(const DualFunctional& a, const DualFunctional& b);
};

/// w(psi) = int_Omega f psi (trapezoid mass).
DualFunctional l2_functional(const Grid2D& g, const Field& f);
/// w(psi) = int_Omega grad f . grad psi (discrete stiffness form).
DualFunctional stiffness_functional(const Grid2D& g, const Field& f);
/// w_a(psi) = -sqrt(lambda_kl) int_{Gamma_1} a phi_kl psi (trapezoid on each side).
DualFunctional boundary_mode_functional(const Grid2D& g, const DampingPair& a, ModeIndex mode);

struct BoundarySourceTag {
  DampingPair damping;
  ModeIndex mode;
};

/// Right-hand side lambda(t) w of the sourced problem.
struct SourceSpec {
  Modulation modulation;
  DualFunctional functional;
  std::optional<BoundarySourceTag> boundary;

  static SourceSpec l2(const Grid2D& g, const Field& w, Modulation lam);
  static SourceSpec boundary_mode(const Grid2D& g, const DampingPair& a, ModeIndex mode,
                                  Modulation lam);
  SourceSpec scaled(double c) const;
};

/// Space-time samples on Gamma_1 = Gamma_11 (y = 0, indexed by x) and
/// Gamma_12 (x = 0, indexed by y). Each channel is [step][node], steps + 1 rows
/// of n values.
struct BoundaryTrace {
  std::size_t n = 0;
  std::size_t steps = 0;
  double dt = 0.0;
  /// d_nu u by one-sided second-order differences (the measurement).
  std::vector<double> normal11, normal12;
  /// -a v, what the boundary condition says d_nu u should be.
  std::vector<double> flux11, flux12;
  /// v = u_t on the boundary.
  std::vector<double> velocity11, velocity12;

  static BoundaryTrace zeros(std::size_t n, std::size_t steps, double dt);

  double tau() const { return dt * static_cast<double>(steps); }
  double normal(int side, std::size_t step, std::size_t i) const {
    return (side == 0 ? normal11 : normal12)[step * n + i];
  }
  /// ||d_nu u||_{L2(Sigma_1)}, trapezoid in space and time.
  double l2_norm() const;
  /// Channelwise difference (normal and flux); velocities are differenced too.
  BoundaryTrace minus(const BoundaryTrace& other) const;
  /// Max pointwise |normal - flux| over the space-time samples.
  double consistency_gap() const;
};

/// Diagonal mass/damping plus matrix-free stiffness for one grid and damping.
class WaveOperator {
 public:
  WaveOperator(const Grid2D& g, const DampingPair& a);

  const Grid2D& grid() const { return grid_; }
  std::span<const double> mass() const { return mass_; }
  std::span<const double> damping() const { return damping_; }
  std::span<const double> side_damping(int side) const { return side == 0 ? a11_ : a12_; }

  /// out = K u (Dirichlet rows zero).
  void apply_stiffness(std::span<const double> u, std::span<double> out) const;
  /// u^T K w.
  double stiffness_form(std::span<const double> u, std::span<const double> w) const;
  double mass_form(std::span<const double> u, std::span<const double> w) const;

 private:
  Grid2D grid_;
  std::vector<double> mass_;
  std::vector<double> damping_;
  std::vector<double> a11_;
  std::vector<double> a12_;
};

/// One kick-drift-kick step. Throws CflError when dt exceeds the stability
/// bound and NumericalError on non-finite output.
WaveState step(const Grid2D& g, const WaveState& state, const DampingPair& a,
               const SourceSpec* source, double dt);

struct SolveResult {
  WaveState final;
  BoundaryTrace trace;
  std::vector<double> times;
  /// E(t_n) = (||grad u||^2 + ||v||^2) / 2 at every step.
  std::vector<double> energy;
  /// Leapfrog energy at half steps, exactly non-increasing without a source.
  std::vector<double> staggered_energy;
  double dt = 0.0;
};

/// Number of steps used for horizon tau: ceil(tau / default_dt(dt_factor)).
std::size_t step_count(const Grid2D& g, double tau, double dt_factor = 0.5);

SolveResult solve(const Grid2D& g, const Field& u0, const Field& u1, const DampingPair& a,
                  const SourceSpec* source, double tau, double dt_factor = 0.5);

double energy(const Grid2D& g, const WaveState& state);

/// max_n |(E_{n+1} - E_{n-1}) / (2 dt) + int_{Gamma_1} a v_n^2| over interior steps.
double dissipation_residual(const SolveResult& traj, const Grid2D& g, const DampingPair& a);

struct RellichResult {
  double lhs = 0.0;
  double rhs = 0.0;
  double residual = 0.0;
  double scale = 0.0;  // |lhs| + |boundary flux term| + |boundary energy term|
};

/// Rellich identity with multiplier m(x) = x - x0 for a sampled phi.
RellichResult rellich_residual(const Grid2D& g, const Field& phi, std::pair<double, double> x0);

struct RieszResult {
  Field z;
  double vprime_norm = 0.0;
  int iterations = 0;
};

/// Solve <grad z, grad psi> = w(psi) for all discrete psi vanishing on
/// Gamma_0 by conjugate gradients; vprime_norm = ||grad z||.
RieszResult riesz_solve(const Grid2D& g, const DualFunctional& w, double rel_tol = 1e-12,
                        int max_iter = 0);

// Persistence -----------------------------------------------------------------

/// CSV "t,i,value" for one side (0 -> Gamma_11, 1 -> Gamma_12) of the normal trace.
void write_trace_csv(std::ostream& os, const BoundaryTrace& tr, int side);
/// Inverse of write_trace_csv for the normal channel of one side.
std::vector<double> read_trace_csv(std::istream& is, std::size_t n, std::size_t steps);

/// Binary dump: header (n: u64, steps: u64, dt: f64, sides: u64) followed by
/// the normal-derivative channels as row-major f64 [side][step][node].
void write_trace_binary(std::ostream& os, const BoundaryTrace& tr);
BoundaryTrace read_trace_binary(std::istream& is);

/// CSV "t,i,value" of a field snapshot; i is the storage index j n + i.
void write_field_csv(std::ostream& os, const Field& f, double t);

}  // namespace dampinv
