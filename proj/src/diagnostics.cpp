#include "dampinv/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>

#include "json.hpp"

#include "dampinv/csv.hpp"
#include "dampinv/error.hpp"

namespace dampinv {

DecayFit fit_decay(std::span<const double> times, std::span<const double> energy,
                   double transient_fraction) {
  if (times.size() != energy.size()) throw InvalidArgument("fit_decay: series lengths differ");
  if (times.size() < 2) throw InvalidArgument("fit_decay: window too short");
  if (transient_fraction < 0.0 || transient_fraction >= 1.0) {
    throw InvalidArgument("fit_decay: transient fraction must lie in [0, 1)");
  }
  const double t0 = times.front();
  const double start = t0 + transient_fraction * (times.back() - t0);

  double st = 0.0, sy = 0.0, stt = 0.0, sty = 0.0;
  std::size_t count = 0;
  for (std::size_t k = 0; k < times.size(); ++k) {
    if (!(energy[k] > 0.0)) throw InvalidArgument("fit_decay: non-positive energy sample");
    if (times[k] < start) continue;
    const double y = 0.5 * std::log(2.0 * energy[k]);
    st += times[k];
    sy += y;
    stt += times[k] * times[k];
    sty += times[k] * y;
    ++count;
  }
  if (count < 3) throw InvalidArgument("fit_decay: window too short");

  const double cnt = static_cast<double>(count);
  const double denom = cnt * stt - st * st;
  if (!(denom > 0.0)) throw InvalidArgument("fit_decay: degenerate time window");
  const double slope = (cnt * sty - st * sy) / denom;
  const double intercept = (sy - slope * st) / cnt;

  DecayFit fit;
  fit.omega_fit = -slope;
  fit.samples = count;
  double ss = 0.0;
  for (std::size_t k = 0; k < times.size(); ++k) {
    if (times[k] < start) continue;
    const double r = 0.5 * std::log(2.0 * energy[k]) - (intercept + slope * times[k]);
    ss += r * r;
  }
  fit.residual = std::sqrt(ss / cnt);

  // Smallest M >= 1 with sqrt(E(t)/E(0)) <= M exp(-omega t) along the series.
  const double e0 = energy.front();
  double m = 1.0;
  for (std::size_t k = 0; k < times.size(); ++k) {
    m = std::max(m, std::sqrt(energy[k] / e0) * std::exp(fit.omega_fit * (times[k] - t0)));
  }
  fit.M_fit = m;
  return fit;
}

std::vector<ModeIndex> probe_set(int max_index) {
  std::vector<ModeIndex> out;
  for (int k = 0; k <= max_index; ++k) {
    for (int l = 0; l <= max_index; ++l) out.push_back({k, l});
  }
  return out;
}

ObservabilityReport estimate_observability(const Grid2D& g, const DampingPair& a, double tau,
                                           std::span<const ModeIndex> probes, double dt_factor) {
  if (probes.empty()) throw InvalidArgument("estimate_observability: empty probe set");
  const WaveOperator op(g, a);
  const Field zero(g.size(), 0.0);

  ObservabilityReport rep;
  rep.tau = tau;
  rep.n = g.n();
  for (const ModeIndex& mode : probes) {
    const Field phi = mode_field(g, mode);
    const double init = std::sqrt(op.stiffness_form(phi, phi));
    if (!(init > 0.0)) throw InvalidArgument("estimate_observability: zero probe");
    const SolveResult run = solve(g, phi, zero, a, nullptr, tau, dt_factor);
    const double tn = run.trace.l2_norm();
    if (!(tn >= kObservabilityFloor * init)) {
      throw ObservabilityError("mode (" + std::to_string(mode.k) + "," + std::to_string(mode.l) +
                               ") leaves no boundary signature: trace norm " + std::to_string(tn) +
                               " vs initial norm " + std::to_string(init));
    }
    rep.ratios.push_back({mode, init, tn, init / tn});
    rep.kappa_est = std::max(rep.kappa_est, init / tn);
  }
  return rep;
}

void write_observability_csv(std::ostream& os, const ObservabilityReport& r) {
  os << "mode_k,mode_l,ratio\n";
  for (const auto& m : r.ratios) {
    os << m.mode.k << ',' << m.mode.l << ',' << csv::format(m.ratio) << '\n';
  }
}

std::string observability_summary_json(const ObservabilityReport& r) {
  nlohmann::ordered_json j;
  j["kappa_est"] = r.kappa_est;
  j["tau"] = r.tau;
  j["n"] = r.n;
  return j.dump(2);
}

}  // namespace dampinv
