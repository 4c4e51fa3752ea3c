#include "dampinv/reconstruction.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <limits>
#include <numbers>
#include <ostream>

#include <Eigen/Dense>

#include "dampinv/csv.hpp"
#include "dampinv/diagnostics.hpp"
#include "dampinv/error.hpp"
#include "dampinv/inverse_source.hpp"

namespace dampinv {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double time_weight(std::size_t s, std::size_t steps) { return (s == 0 || s == steps) ? 0.5 : 1.0; }

std::string mode_name(ModeIndex m) {
  return "(" + std::to_string(m.k) + "," + std::to_string(m.l) + ")";
}

// Pair whose corner is forced to the mean of the two side values.
DampingPair with_mean_corner(std::vector<double> a1, std::vector<double> a2) {
  const double c = 0.5 * (a1.front() + a2.front());
  a1.front() = c;
  a2.front() = c;
  return DampingPair(SampledFunction1D(std::move(a1)), SampledFunction1D(std::move(a2)), kInf);
}

std::vector<double> to_vector(const SampledFunction1D& f) {
  return {f.values().begin(), f.values().end()};
}

}  // namespace

void require_mode_resolved(const Grid2D& g, ModeIndex mode) {
  if (mode.k < 0 || mode.l < 0) throw InvalidArgument("mode indices must be >= 0");
  const double cells = static_cast<double>(g.n() - 1);
  const double worst = std::max(mode.k, mode.l) + 0.5;
  if (cells / worst < 8.0) {
    throw ResolutionError("mode " + mode_name(mode) + " needs at least " +
                          std::to_string(static_cast<int>(std::ceil(8.0 * worst))) +
                          " cells per side, grid has " + std::to_string(g.n() - 1));
  }
}

BoundaryTrace reference_trace(const Grid2D& g, ModeIndex mode, double tau, double dt_factor) {
  require_mode_resolved(g, mode);
  const Field phi = mode_field(g, mode);
  return solve(g, phi, Field(g.size(), 0.0), DampingPair::zero(g.n()), nullptr, tau, dt_factor)
      .trace;
}

ModalMeasurement probe_mode(const Grid2D& g, const DampingPair& a, ModeIndex mode, double tau,
                            double dt_factor) {
  return probe_mode(g, a, mode, tau, reference_trace(g, mode, tau, dt_factor), dt_factor);
}

ModalMeasurement probe_mode(const Grid2D& g, const DampingPair& a, ModeIndex mode, double tau,
                            const BoundaryTrace& reference, double dt_factor) {
  require_mode_resolved(g, mode);
  const Field phi = mode_field(g, mode);
  const SolveResult run = solve(g, phi, Field(g.size(), 0.0), a, nullptr, tau, dt_factor);
  ModalMeasurement out{mode, run.trace.minus(reference), 0.0};
  out.trace_norm = out.trace.l2_norm();
  return out;
}

ModalProfiles time_project(const ModalMeasurement& meas) {
  const auto& tr = meas.trace;
  const double omega = eigenpair(meas.mode).omega;
  std::vector<double> basis(tr.steps + 1);
  double denom = 0.0;
  for (std::size_t s = 0; s <= tr.steps; ++s) {
    basis[s] = std::sin(omega * static_cast<double>(s) * tr.dt);
    denom += time_weight(s, tr.steps) * basis[s] * basis[s];
  }
  denom *= tr.dt;
  if (!(denom > 1e-12 * tr.tau())) {
    throw InvalidArgument("time_project: sin(omega t) has no energy on the horizon");
  }
  std::vector<double> y1(tr.n, 0.0), y2(tr.n, 0.0);
  for (std::size_t s = 0; s <= tr.steps; ++s) {
    const double w = time_weight(s, tr.steps) * tr.dt * basis[s];
    for (std::size_t i = 0; i < tr.n; ++i) {
      y1[i] += w * tr.normal11[s * tr.n + i];
      y2[i] += w * tr.normal12[s * tr.n + i];
    }
  }
  for (std::size_t i = 0; i < tr.n; ++i) {
    y1[i] /= denom;
    y2[i] /= denom;
  }
  return {meas.mode, SampledFunction1D(std::move(y1)), SampledFunction1D(std::move(y2))};
}

LinearizedEstimate linearized_recover(const ModalProfiles& y, double guard) {
  if (guard < 0.0 || guard >= 1.0) throw InvalidArgument("guard must lie in [0, 1)");
  const double omega = eigenpair(y.mode).omega;
  const double floor = std::numbers::sqrt2 * std::sin(0.5 * std::numbers::pi * guard);

  auto invert = [&](const SampledFunction1D& prof, int k, std::vector<char>& usable) {
    const std::size_t n = prof.size();
    std::vector<double> out(n, 0.0);
    usable.assign(n, 0);
    for (std::size_t i = 0; i < n; ++i) {
      const double s = prof.node(i);
      const double phi = eval_phi1d(k, s);
      if (s > 1.0 - guard + 1e-12 || std::abs(phi) < floor || phi == 0.0) continue;
      usable[i] = 1;
      out[i] = prof[i] / (std::numbers::sqrt2 * omega * phi);
    }
    // Nearest usable value elsewhere; ties go to the smaller index.
    std::vector<std::size_t> idx;
    for (std::size_t i = 0; i < n; ++i) {
      if (usable[i]) idx.push_back(i);
    }
    if (idx.empty()) {
      throw InvalidArgument("linearized_recover: mode " + mode_name(y.mode) +
                            " has no usable node outside the guard band");
    }
    for (std::size_t i = 0; i < n; ++i) {
      if (usable[i]) continue;
      auto it = std::lower_bound(idx.begin(), idx.end(), i);
      std::size_t pick;
      if (it == idx.end()) {
        pick = idx.back();
      } else if (it == idx.begin()) {
        pick = *it;
      } else {
        const std::size_t hi = *it, lo = *(it - 1);
        pick = (i - lo <= hi - i) ? lo : hi;
      }
      out[i] = out[pick];
    }
    for (double& v : out) v = std::max(v, 0.0);
    return out;
  };

  LinearizedEstimate est{DampingPair::zero(y.side1.size()), {}, {}};
  auto a1 = invert(y.side1, y.mode.k, est.usable1);
  auto a2 = invert(y.side2, y.mode.l, est.usable2);
  est.damping = with_mean_corner(std::move(a1), std::move(a2));
  return est;
}

namespace {

double guarded_sq(const SampledFunction1D& f, double guard) {
  const std::size_t n = f.size();
  const double h = f.spacing();
  const double end = 1.0 - guard;
  // Trapezoid over nodes in [0, end] plus a partial cell when end falls inside one.
  double acc = 0.0;
  for (std::size_t i = 0; i + 1 < n; ++i) {
    const double s0 = f.node(i), s1 = f.node(i + 1);
    if (s1 <= end + 1e-12) {
      acc += 0.5 * h * (f[i] * f[i] + f[i + 1] * f[i + 1]);
    } else {
      if (s0 < end - 1e-12) {
        const double len = end - s0;
        const double fe = f.at(end);
        acc += 0.5 * len * (f[i] * f[i] + fe * fe);
      }
      break;
    }
  }
  return acc;
}

}  // namespace

double guarded_l2_distance(const DampingPair& a, const DampingPair& b, double guard) {
  const std::size_t n = std::max(a.size(), b.size());
  const DampingPair ar = a.size() == n ? a : a.resampled(n);
  const DampingPair br = b.size() == n ? b : b.resampled(n);
  return std::sqrt(guarded_sq(ar.a1() - br.a1(), guard) + guarded_sq(ar.a2() - br.a2(), guard));
}

double guarded_l2_norm(const DampingPair& a, double guard) {
  return std::sqrt(guarded_sq(a.a1(), guard) + guarded_sq(a.a2(), guard));
}

DampingPair truncate(const DampingPair& a, int order) {
  auto side = [&](const SampledFunction1D& f, Side s) {
    auto v = to_vector(fourier_synthesize(fourier_project(f, order, s), f.size()));
    for (double& x : v) x = std::max(x, 0.0);
    return v;
  };
  return with_mean_corner(side(a.a1(), Side::Gamma11), side(a.a2(), Side::Gamma12));
}

double graph_norm(ModeIndex mode) {
  const double lam = eigenpair(mode).lambda;
  return std::sqrt(lam + lam * lam);
}

GapEstimate estimate_gap(const Grid2D& g, const DampingPair& a, int K, double tau,
                         double dt_factor) {
  if (K < 0) throw InvalidArgument("probe budget K must be >= 0");
  std::vector<BoundaryTrace> refs;
  for (const ModeIndex& m : probe_set(K)) refs.push_back(reference_trace(g, m, tau, dt_factor));
  return estimate_gap(g, a, K, tau, refs, dt_factor);
}

GapEstimate estimate_gap(const Grid2D& g, const DampingPair& a, int K, double tau,
                         std::span<const BoundaryTrace> references, double dt_factor) {
  if (K < 0) throw InvalidArgument("probe budget K must be >= 0");
  const auto modes = probe_set(K);
  if (references.size() != modes.size()) {
    throw InvalidArgument("estimate_gap: expected one reference trace per probe");
  }
  GapEstimate out;
  out.probe_budget = K;
  for (std::size_t p = 0; p < modes.size(); ++p) {
    const ModalMeasurement meas = probe_mode(g, a, modes[p], tau, references[p], dt_factor);
    const double v = meas.trace_norm / graph_norm(modes[p]);
    out.probes.push_back({modes[p], meas.trace_norm, v});
    out.value = std::max(out.value, v);
  }
  return out;
}

bool truncation_rule_holds(double C, double m, double alpha, double delta, int N) {
  const double n = static_cast<double>(N);
  return std::log(C / m) + alpha * n * n + std::log(delta) + 2.0 * std::log(n) <= 0.0;
}

int select_N0(double C, double m, double alpha, double delta) {
  if (!(C > 0.0) || !(m > 0.0) || !(alpha > 0.0)) {
    throw InvalidArgument("select_N0: C, m and alpha must be positive");
  }
  if (!(delta > 0.0)) throw InvalidArgument("select_N0: delta must be positive");
  if (!truncation_rule_holds(C, m, alpha, delta, 1)) {
    throw RegimeError("select_N0: (C/m) exp(alpha) delta > 1, outside the small-gap regime");
  }
  int N = 1;
  while (truncation_rule_holds(C, m, alpha, delta, N + 1)) ++N;
  return N;
}

double truncation_rate(double tau) { return tau * tau * std::numbers::pi * std::numbers::pi + 2.0; }

double stability_rhs(double delta, double m, double M, double c_cal) {
  if (delta < 0.0 || std::isnan(delta)) throw InvalidArgument("stability_rhs: delta must be >= 0");
  if (!(m > 0.0)) throw InvalidArgument("stability_rhs: m must be positive");
  if (delta == 0.0) return kInf;
  if (delta == m) throw InvalidArgument("stability_rhs: delta = m is singular");
  const double r = delta / m;
  return c_cal * M * (1.0 / std::sqrt(std::abs(std::log(r))) + r);
}

DampingPair sweep_base_pair(std::size_t n) {
  return DampingPair(SampledFunction1D::sample([](double s) { return 1.0 + 0.5 * s; }, n),
                     SampledFunction1D::constant(1.0, n));
}

std::vector<FamilyMember> scaled_family(const DampingPair& base,
                                        std::span<const double> epsilons) {
  std::vector<FamilyMember> out;
  for (std::size_t i = 0; i < epsilons.size(); ++i) {
    const double eps = epsilons[i];
    if (!(eps >= 0.0)) throw InvalidArgument("family scale factors must be >= 0");
    out.push_back({"a" + std::to_string(i), eps, base.scaled(eps)});
  }
  return out;
}

SweepResult stability_sweep(const Grid2D& g, std::span<const FamilyMember> family,
                            const SweepConfig& cfg) {
  if (family.empty()) throw InvalidArgument("stability_sweep: empty family");
  if (cfg.calibration >= family.size()) {
    throw InvalidArgument("stability_sweep: calibration index out of range");
  }
  SweepResult res;
  auto& k = res.constants;
  k.alpha = truncation_rate(cfg.tau);
  k.m = kInf;
  for (const auto& mem : family) {
    if (mem.damping.size() != g.n()) {
      throw InvalidArgument("stability_sweep: member " + mem.id + " is not sampled on the grid");
    }
    k.m = std::min(k.m, mem.damping.min());
    k.M = std::max({k.M, sobolev_norms(mem.damping.a1()).h1, sobolev_norms(mem.damping.a2()).h1});
  }

  const auto modes = probe_set(cfg.K);
  std::vector<BoundaryTrace> refs;
  for (const ModeIndex& m : modes) refs.push_back(reference_trace(g, m, cfg.tau, cfg.dt_factor));
  const ModeIndex recon_mode{0, 0};
  const BoundaryTrace& recon_ref = refs.front();  // probe_set starts at (0, 0)

  // Squared L2 norms of the sides and squared leading coefficients, per member.
  std::vector<double> side_sq(family.size()), lead_sq(family.size());
  for (std::size_t i = 0; i < family.size(); ++i) {
    const auto& mem = family[i];
    const auto& a = mem.damping;
    SweepRecord rec;
    rec.damping_id = mem.id;
    rec.epsilon = mem.epsilon;
    rec.delta = estimate_gap(g, a, cfg.K, cfg.tau, refs, cfg.dt_factor).value;
    rec.a_l2 = a.l2_norm();

    const auto meas = probe_mode(g, a, recon_mode, cfg.tau, recon_ref, cfg.dt_factor);
    const auto est = linearized_recover(time_project(meas), cfg.guard);
    rec.recon_error_l2 = guarded_l2_distance(truncate(est.damping, cfg.N), a, cfg.guard);

    const double l1 = sobolev_norms(a.a1()).l2, l2 = sobolev_norms(a.a2()).l2;
    side_sq[i] = std::max(l1 * l1, l2 * l2);
    const double c1 = fourier_project(a.a1(), 0, Side::Gamma11).coeffs[0];
    const double c2 = fourier_project(a.a2(), 0, Side::Gamma12).coeffs[0];
    lead_sq[i] = std::max(c1 * c1, c2 * c2);
    if (rec.delta > 0.0 && k.m > 0.0 && k.M > 0.0) {
      rec.C_emp = lead_sq[i] * k.m / (k.M * k.M * rec.delta);
    }
    res.records.push_back(rec);
  }

  const SweepRecord& cal = res.records[cfg.calibration];
  const bool informative = k.m > 0.0 && k.M > 0.0 && cal.delta > 0.0;
  if (informative) {
    k.c_cal = cal.a_l2 / stability_rhs(cal.delta, k.m, k.M, 1.0);
    const double x = std::exp(k.alpha) * cal.delta / k.m;
    k.C_trunc = side_sq[cfg.calibration] / (k.M * k.M * (x + 1.0));
    k.C_emp = cal.C_emp;
  }
  for (auto& rec : res.records) {
    if (!informative || rec.delta == 0.0) {
      rec.bound_rhs = kInf;
      rec.N0 = 0;
      continue;
    }
    rec.bound_rhs = stability_rhs(rec.delta, k.m, k.M, k.c_cal);
    rec.N0 = k.C_trunc > 0.0 ? select_N0(k.C_trunc, k.m, k.alpha, rec.delta) : 0;
  }
  return res;
}

void write_sweep_csv(std::ostream& os, const SweepResult& r) {
  os << "damping_id,epsilon,delta,a_l2,bound_rhs,N0,recon_error_l2,C_emp\n";
  for (const auto& rec : r.records) {
    os << rec.damping_id << ',' << csv::format(rec.epsilon) << ',' << csv::format(rec.delta) << ','
       << csv::format(rec.a_l2) << ',' << csv::format(rec.bound_rhs) << ',' << rec.N0 << ','
       << csv::format(rec.recon_error_l2) << ',' << csv::format(rec.C_emp) << '\n';
  }
}

ProductNorms product_norms(const Grid2D& g, const DampingPair& a, ModeIndex mode) {
  const WaveOperator op(g, DampingPair::zero(g.n()));
  Field prod(g.size()), weighted(g.size());
  for (std::size_t j = 0; j < g.n(); ++j) {
    for (std::size_t i = 0; i < g.n(); ++i) {
      const std::size_t p = g.index(i, j);
      prod[p] = a.a1().at(g.coord(i)) * a.a2().at(g.coord(j));
    }
  }
  const Field phi = mode_field(g, mode);
  for (std::size_t p = 0; p < g.size(); ++p) weighted[p] = prod[p] * phi[p];
  ProductNorms out;
  out.v_norm = std::sqrt(op.stiffness_form(weighted, weighted));
  out.h1_norm = std::sqrt(op.mass_form(prod, prod) + op.stiffness_form(prod, prod));
  return out;
}

double product_bound_constant() {
  return 2.0 * std::sqrt(1.0 + 2.0 / (std::numbers::pi * std::numbers::pi));
}

// ---------------------------------------------------------------------------
// Gauss-Newton refinement

namespace {

class TraceFit {
 public:
  TraceFit(const Grid2D& g, std::span<const ModalMeasurement> meas, const DampingPair& init,
           const LeastSquaresConfig& cfg)
      : g_(g), meas_(meas), init_(init), cfg_(cfg) {
    if (meas.empty()) throw InvalidArgument("least squares needs at least one measurement");
    if (init.size() != g.n()) throw InvalidArgument("initial damping is not sampled on the grid");
    if (cfg.order < 0) throw InvalidArgument("least squares order must be >= 0");
    for (const auto& m : meas) refs_.push_back(reference_trace(g, m.mode, cfg.tau, cfg.dt_factor));
    const std::size_t n = g.n();
    basis_.resize(static_cast<std::size_t>(cfg.order) + 1);
    for (int k = 0; k <= cfg.order; ++k) {
      auto& b = basis_[static_cast<std::size_t>(k)];
      b.resize(n);
      for (std::size_t i = 0; i < n; ++i) b[i] = eval_phi1d(k, g.coord(i));
    }
  }

  std::size_t params() const { return 2 * static_cast<std::size_t>(cfg_.order) + 1; }

  // p = (c1_0..c1_N, c2_1..c2_N); c2_0 keeps sum c1 = sum c2, since every
  // mode takes the same value at s = 0.
  DampingPair build(const Eigen::VectorXd& p) const {
    const std::size_t N = static_cast<std::size_t>(cfg_.order);
    std::vector<double> c1(N + 1), c2(N + 1);
    double s1 = 0.0, s2 = 0.0;
    for (std::size_t k = 0; k <= N; ++k) {
      c1[k] = p[static_cast<Eigen::Index>(k)];
      s1 += c1[k];
    }
    for (std::size_t k = 1; k <= N; ++k) {
      c2[k] = p[static_cast<Eigen::Index>(N + k)];
      s2 += c2[k];
    }
    c2[0] = s1 - s2;
    std::vector<double> a1 = to_vector(init_.a1()), a2 = to_vector(init_.a2());
    for (std::size_t k = 0; k <= N; ++k) {
      for (std::size_t i = 0; i < a1.size(); ++i) {
        a1[i] += c1[k] * basis_[k][i];
        a2[i] += c2[k] * basis_[k][i];
      }
    }
    for (double& v : a1) v = std::max(v, 0.0);
    for (double& v : a2) v = std::max(v, 0.0);
    return with_mean_corner(std::move(a1), std::move(a2));
  }

  Eigen::VectorXd residual(const DampingPair& a) const {
    std::vector<double> out;
    for (std::size_t q = 0; q < meas_.size(); ++q) {
      const auto& m = meas_[q];
      const Field phi = mode_field(g_, m.mode);
      const auto tr = solve(g_, phi, Field(g_.size(), 0.0), a, nullptr, cfg_.tau, cfg_.dt_factor)
                          .trace.minus(refs_[q]);
      if (tr.steps != m.trace.steps || tr.n != m.trace.n) {
        throw InvalidArgument("measurement does not match the grid and horizon");
      }
      const TimeSignal model = observe(tr);
      const TimeSignal data = observe(m.trace);
      for (std::size_t s = 0; s <= model.steps(); ++s) {
        const double w = std::sqrt(time_weight(s, model.steps()) * model.dt());
        for (std::size_t c = 0; c < model.dim(); ++c) out.push_back(w * (model(s, c) - data(s, c)));
      }
    }
    return Eigen::Map<Eigen::VectorXd>(out.data(), static_cast<Eigen::Index>(out.size()));
  }

 private:
  const Grid2D& g_;
  std::span<const ModalMeasurement> meas_;
  DampingPair init_;
  LeastSquaresConfig cfg_;
  std::vector<BoundaryTrace> refs_;
  std::vector<std::vector<double>> basis_;
};

}  // namespace

double data_residual(const Grid2D& g, std::span<const ModalMeasurement> meas,
                     const DampingPair& candidate, double tau, double dt_factor) {
  LeastSquaresConfig cfg;
  cfg.tau = tau;
  cfg.dt_factor = dt_factor;
  cfg.order = 0;
  const TraceFit fit(g, meas, candidate, cfg);
  return fit.residual(candidate).norm();
}

LeastSquaresResult fit_damping_least_squares(const Grid2D& g,
                                             std::span<const ModalMeasurement> meas,
                                             const DampingPair& init,
                                             const LeastSquaresConfig& cfg) {
  const TraceFit fit(g, meas, init, cfg);
  const auto P = static_cast<Eigen::Index>(fit.params());

  Eigen::VectorXd p = Eigen::VectorXd::Zero(P);
  DampingPair current = fit.build(p);
  Eigen::VectorXd r = fit.residual(current);

  LeastSquaresResult out{current, r.norm(), r.norm(), {r.norm()}, 0, false};
  int worse = 0;
  for (int it = 0; it < cfg.iters; ++it) {
    if (r.norm() == 0.0) break;
    Eigen::MatrixXd J(r.size(), P);
    for (Eigen::Index c = 0; c < P; ++c) {
      Eigen::VectorXd q = p;
      q[c] += cfg.fd_step;
      J.col(c) = (fit.residual(fit.build(q)) - r) / cfg.fd_step;
    }
    const Eigen::VectorXd step = J.completeOrthogonalDecomposition().solve(-r);

    // Backtracking; the last trial is kept even when it does not improve.
    double scale = 1.0;
    Eigen::VectorXd trial_p, trial_r;
    DampingPair trial = current;
    for (int b = 0; b < 4; ++b, scale *= 0.5) {
      trial_p = p + scale * step;
      trial = fit.build(trial_p);
      trial_r = fit.residual(trial);
      if (trial_r.norm() < r.norm()) break;
    }
    const bool improved = trial_r.norm() < r.norm();
    const double rel_gain = (r.norm() - trial_r.norm()) / r.norm();
    p = trial_p;
    r = trial_r;
    current = trial;
    out.iterations = it + 1;
    out.history.push_back(r.norm());
    if (r.norm() < out.final_residual) {
      out.final_residual = r.norm();
      out.estimate = current;
    }
    worse = improved ? 0 : worse + 1;
    if (worse >= 3) {
      out.stalled = true;
      break;
    }
    if (improved && rel_gain < 1e-6) break;
  }
  return out;
}

void write_profile_csv(std::ostream& os, const SampledFunction1D& f) {
  os << "s,value\n";
  for (std::size_t i = 0; i < f.size(); ++i) {
    os << csv::format(f.node(i)) << ',' << csv::format(f[i]) << '\n';
  }
}

SampledFunction1D read_profile_csv(std::istream& is) {
  std::string line;
  if (!std::getline(is, line) || line.rfind("s,value", 0) != 0) {
    throw InvalidArgument("profile csv: missing header 's,value'");
  }
  std::vector<double> v;
  while (std::getline(is, line)) {
    if (line.empty() || line == "\r") continue;
    const auto cols = csv::split(line);
    if (cols.size() != 2) throw InvalidArgument("profile csv: expected 2 columns");
    v.push_back(csv::parse_double(cols[1]));
  }
  if (v.size() < 3) throw InvalidArgument("profile csv: need at least 3 samples");
  return SampledFunction1D(std::move(v));
}

}  // namespace dampinv
