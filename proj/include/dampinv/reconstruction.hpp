#pragma once

// Modal probing of the boundary map, linearized and least-squares recovery of
// the damping pair, Fourier truncation, and the logarithmic stability sweep.

#include <cstddef>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "dampinv/spectral.hpp"
#include "dampinv/wave.hpp"

namespace dampinv {

/// Difference of boundary traces under a and under zero damping for the
/// initial data (phi_kl, 0).
struct ModalMeasurement {
  ModeIndex mode;
  BoundaryTrace trace;
  double trace_norm = 0.0;
};

/// Throws ResolutionError unless the grid has at least 8 cells per half
/// period of the mode in both directions.
void require_mode_resolved(const Grid2D& g, ModeIndex mode);

/// Undamped trace for (phi_kl, 0); the subtrahend of every measurement.
BoundaryTrace reference_trace(const Grid2D& g, ModeIndex mode, double tau, double dt_factor = 0.5);

ModalMeasurement probe_mode(const Grid2D& g, const DampingPair& a, ModeIndex mode, double tau,
                            double dt_factor = 0.5);
/// Same, reusing a reference trace computed for this grid, mode and horizon.
ModalMeasurement probe_mode(const Grid2D& g, const DampingPair& a, ModeIndex mode, double tau,
                            const BoundaryTrace& reference, double dt_factor = 0.5);

struct ModalProfiles {
  ModeIndex mode;
  SampledFunction1D side1;  // along y = 0, indexed by x
  SampledFunction1D side2;  // along x = 0, indexed by y
};

/// Projection of each boundary node's time series onto sin(omega_kl t).
ModalProfiles time_project(const ModalMeasurement& meas);

struct LinearizedEstimate {
  DampingPair damping;
  std::vector<char> usable1, usable2;  // nodes where the pointwise inversion was applied
};

/// Pointwise inversion a = Y / (sqrt(2) omega phi) on nodes with s <= 1 - guard
/// and |phi| above its value at the guard edge; other nodes take the nearest
/// usable value. The corner is the mean of the two side values.
LinearizedEstimate linearized_recover(const ModalProfiles& y, double guard);

/// L2 norm of a1 - b1 and a2 - b2 over [0, 1 - guard], both sides combined.
double guarded_l2_distance(const DampingPair& a, const DampingPair& b, double guard);
double guarded_l2_norm(const DampingPair& a, double guard);

/// Fourier truncation of both sides to order N.
DampingPair truncate(const DampingPair& a, int order);

struct ProbeGap {
  ModeIndex mode;
  double trace_norm = 0.0;
  double normalized = 0.0;  // trace_norm / sqrt(lambda + lambda^2)
};

struct GapEstimate {
  double value = 0.0;
  int probe_budget = 0;
  std::vector<ProbeGap> probes;
};

/// Norm of phi_kl in the graph norm sqrt(||grad||^2 + ||Laplacian||^2).
double graph_norm(ModeIndex mode);

/// Max over 0 <= k, l <= K of the normalized modal measurement norm.
GapEstimate estimate_gap(const Grid2D& g, const DampingPair& a, int K, double tau,
                         double dt_factor = 0.5);
/// Same with precomputed references ordered as probe_set(K).
GapEstimate estimate_gap(const Grid2D& g, const DampingPair& a, int K, double tau,
                         std::span<const BoundaryTrace> references, double dt_factor = 0.5);

/// (C/m) exp(alpha N^2) delta <= 1 / N^2, evaluated in log space.
bool truncation_rule_holds(double C, double m, double alpha, double delta, int N);

/// Greatest N >= 1 satisfying truncation_rule_holds. Throws RegimeError when
/// N = 1 already fails and InvalidArgument for non-positive inputs.
int select_N0(double C, double m, double alpha, double delta);

/// alpha = tau^2 pi^2 + 2.
double truncation_rate(double tau);

/// c M (|ln(delta / m)|^{-1/2} + delta / m); +inf for delta = 0.
/// Throws InvalidArgument for delta < 0, m <= 0, or delta == m.
double stability_rhs(double delta, double m, double M, double c_cal);

struct FamilyMember {
  std::string id;
  double epsilon = 1.0;
  DampingPair damping;
};

/// (1 + s/2, 1) on n nodes.
DampingPair sweep_base_pair(std::size_t n);
std::vector<FamilyMember> scaled_family(const DampingPair& base, std::span<const double> epsilons);

struct SweepConfig {
  double tau = 4.0;
  double dt_factor = 0.5;
  int K = 2;
  int N = 4;
  double guard = 0.2;
  std::size_t calibration = 0;
};

struct SweepRecord {
  std::string damping_id;
  double epsilon = 0.0;
  double delta = 0.0;
  double a_l2 = 0.0;
  double bound_rhs = 0.0;
  int N0 = 0;  // 0 when delta = 0 (bound vacuous)
  double recon_error_l2 = 0.0;
  double C_emp = 0.0;
};

struct SweepConstants {
  double m = 0.0;        // min of every side over the family
  double M = 0.0;        // max H1 norm of a side over the family
  double alpha = 0.0;
  double c_cal = 0.0;    // log-stability constant, equality at the calibration member
  double C_trunc = 0.0;  // smallest truncation-bound constant at the calibration member
  double C_emp = 0.0;    // leading-coefficient constant at the calibration member
};

struct SweepResult {
  std::vector<SweepRecord> records;
  SweepConstants constants;
};

SweepResult stability_sweep(const Grid2D& g, std::span<const FamilyMember> family,
                            const SweepConfig& cfg);

/// damping_id,epsilon,delta,a_l2,bound_rhs,N0,recon_error_l2,C_emp
void write_sweep_csv(std::ostream& os, const SweepResult& r);

/// ||(a1 (x) a2) phi_kl||_V and ||a1 (x) a2||_{H1(Omega)} on the grid.
struct ProductNorms {
  double v_norm = 0.0;
  double h1_norm = 0.0;
};
ProductNorms product_norms(const Grid2D& g, const DampingPair& a, ModeIndex mode);

/// 2 sqrt(1 + 2 / pi^2): sup |phi_kl| = 2, sup |grad phi_kl| <= 2 sqrt(lambda_kl),
/// lambda_kl >= pi^2 / 2.
double product_bound_constant();

struct LeastSquaresResult {
  DampingPair estimate;
  double initial_residual = 0.0;
  double final_residual = 0.0;
  std::vector<double> history;
  int iterations = 0;
  bool stalled = false;  // three consecutive non-improving steps
};

struct LeastSquaresConfig {
  int iters = 6;
  int order = 4;
  double tau = 4.0;
  double dt_factor = 0.5;
  double fd_step = 1e-6;
};

/// Gauss-Newton over Fourier perturbations of both sides up to `order`, with
/// the corner constraint eliminated and a projection onto a >= 0 per step.
LeastSquaresResult fit_damping_least_squares(const Grid2D& g,
                                             std::span<const ModalMeasurement> meas,
                                             const DampingPair& init,
                                             const LeastSquaresConfig& cfg);

/// Residual norm of a candidate against the measurements.
double data_residual(const Grid2D& g, std::span<const ModalMeasurement> meas,
                     const DampingPair& candidate, double tau, double dt_factor = 0.5);

/// Two-column CSV "s,value".
void write_profile_csv(std::ostream& os, const SampledFunction1D& f);
SampledFunction1D read_profile_csv(std::istream& is);

}  // namespace dampinv
