#pragma once

// Post-processing of forward trajectories: exponential decay fits and the
// empirical observability constant.

#include <cstddef>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "dampinv/spectral.hpp"
#include "dampinv/wave.hpp"

namespace dampinv {

/// sqrt(2 E(t)) ~ M exp(-omega t) fitted on the window after the transient.
struct DecayFit {
  double M_fit = 1.0;
  double omega_fit = 0.0;
  double residual = 0.0;  // RMS misfit of the log-linear regression
  std::size_t samples = 0;
};

/// Least squares on log sqrt(2E) against t over the samples with
/// t >= t_0 + transient_fraction (t_end - t_0).
DecayFit fit_decay(std::span<const double> times, std::span<const double> energy,
                   double transient_fraction = 0.1);

struct ModeRatio {
  ModeIndex mode;
  double initial_norm = 0.0;  // discrete V norm of the initial displacement
  double trace_norm = 0.0;
  double ratio = 0.0;
};

struct ObservabilityReport {
  double kappa_est = 0.0;
  std::vector<ModeRatio> ratios;
  double tau = 0.0;
  std::size_t n = 0;
};

/// {(k, l) : 0 <= k, l <= max_index} in lexicographic order.
std::vector<ModeIndex> probe_set(int max_index = 2);

/// A trace smaller than this fraction of the initial norm counts as zero.
inline constexpr double kObservabilityFloor = 1e-2;

/// Runs (phi_kl, 0) for every probe and reports ||(u0, 0)|| / ||d_nu u||.
/// Throws ObservabilityError when some probe leaves no boundary signature.
ObservabilityReport estimate_observability(const Grid2D& g, const DampingPair& a, double tau,
                                           std::span<const ModeIndex> probes,
                                           double dt_factor = 0.5);

void write_observability_csv(std::ostream& os, const ObservabilityReport& r);
std::string observability_summary_json(const ObservabilityReport& r);

}  // namespace dampinv
