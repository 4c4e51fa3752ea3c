#pragma once

// Convolution operators of the inverse source problem and the stability
// checks built on them.

#include "dampinv/signal.hpp"
#include "dampinv/wave.hpp"

namespace dampinv {

/// (S h)(t_n) = int_0^{t_n} lambda(t_n - s) h(s) ds by the trapezoid rule.
/// Row 0 is zero and row n only reads h_0..h_n.
TimeSignal convolve_S(const Modulation& lam, const TimeSignal& h);

/// Exact adjoint of convolve_S for the trapezoid-in-time inner product.
/// Interior rows equal the trapezoid rule for int_t^tau lambda(s - t) h(s) ds;
/// row m only reads h_m..h_N. The last row keeps the half-cell term
/// lambda(0) h(tau) dt / 2 that exact adjointness requires.
TimeSignal convolve_Sstar(const Modulation& lam, const TimeSignal& h);

/// sqrt(2) / |lambda(0)| * exp(||lambda'||^2 tau / lambda(0)^2).
/// Throws InvalidArgument when lambda(0) = 0.
double stability_factor(const Modulation& lam, double tau);

struct BoundCheck {
  double lhs = 0.0;
  double rhs = 0.0;
  bool holds = false;
};

/// ||h|| against stability_factor * ||(S* h)'||.
BoundCheck gronwall_bound_check(const Modulation& lam, const TimeSignal& h,
                                double rel_tol = 1e-12);

/// Boundary trace as an observation signal. Component i of side s carries
/// sqrt(quadrature weight) * d_nu u, so the Euclidean product of two rows is
/// the trapezoid L2 product on the damped boundary. Components are ordered
/// side 0 nodes then side 1 nodes.
TimeSignal observe(const BoundaryTrace& tr);

/// Observation of the unforced evolution from (0, M^{-1} w): the action of
/// the observation map on the source profile.
TimeSignal free_response(const Grid2D& g, const DampingPair& a, const DualFunctional& w,
                         double tau, double dt_factor = 0.5);

/// S applied to free_response.
TimeSignal apply_E(const Grid2D& g, const DampingPair& a, const DualFunctional& w,
                   const Modulation& lam, double tau, double dt_factor = 0.5);

/// Observation of the forced problem with zero initial data.
TimeSignal sourced_response(const Grid2D& g, const DampingPair& a, const SourceSpec& src,
                            double tau, double dt_factor = 0.5);

struct SourceBoundResult {
  double wnorm = 0.0;
  double trace_norm = 0.0;
  double ratio = 0.0;
  double factor = 0.0;  // stability_factor of the modulation
  double c_emp = 0.0;   // ratio / factor
};

/// Forced run from rest; compares the discrete V' norm of the source with the
/// L2 norm of the boundary trace. Throws ObservabilityError when a nonzero
/// source leaves no trace.
SourceBoundResult check_source_bound(const Grid2D& g, const DampingPair& a, const SourceSpec& src,
                          double tau, double dt_factor = 0.5);

}  // namespace dampinv
