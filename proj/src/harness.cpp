#include "dampinv/harness.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <numbers>
#include <ostream>
#include <random>
#include <sstream>

#include <openssl/evp.h>

#include "json.hpp"

#include "dampinv/csv.hpp"
#include "dampinv/diagnostics.hpp"
#include "dampinv/inverse_source.hpp"
#include "dampinv/reconstruction.hpp"
#include "dampinv/wave.hpp"

namespace dampinv {

using json = nlohmann::ordered_json;

// ---------------------------------------------------------------------------
// Manifest

std::string sha256_hex(std::string_view bytes) {
  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(bytes.data(), bytes.size(), md, &len, EVP_sha256(), nullptr) != 1) {
    throw NumericalError("sha256: digest failed");
  }
  std::ostringstream os;
  for (unsigned int i = 0; i < len; ++i) {
    os << std::hex << std::setw(2) << std::setfill('0') << static_cast<int>(md[i]);
  }
  return os.str();
}

std::string sha256_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InvalidArgument("cannot read " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return sha256_hex(buf.str());
}

RunManifest::RunManifest(std::filesystem::path dir, const ExperimentConfig& cfg,
                         std::string command)
    : dir_(std::move(dir)), config_hash_(sha256_hex(cfg.canonical())), command_(std::move(command)) {
  std::error_code ec;
  std::filesystem::create_directories(dir_, ec);
  if (ec) throw ConfigError("out: cannot create '" + dir_.string() + "': " + ec.message());
}

void RunManifest::emit(const std::string& name, const std::string& contents) {
  std::ofstream out(dir_ / name, std::ios::binary);
  out << contents;
  if (!out) throw NumericalError("cannot write " + (dir_ / name).string());
  if (std::find(files_.begin(), files_.end(), name) == files_.end()) files_.push_back(name);
}

void RunManifest::time(const std::string& stage, double seconds) { timings_.emplace_back(stage, seconds); }

void RunManifest::write() const {
  json j;
  j["tool"] = "dampinv";
  j["version"] = kToolVersion;
  j["command"] = command_;
  j["config_sha256"] = config_hash_;
  j["files"] = json::array();
  for (const auto& f : files_) {
    const auto p = dir_ / f;
    j["files"].push_back({{"name", f},
                          {"sha256", sha256_file(p)},
                          {"bytes", std::filesystem::file_size(p)}});
  }
  json t = json::object();
  for (const auto& [k, v] : timings_) t[k] = v;
  j["timings_s"] = t;
  std::ofstream out(dir_ / "manifest.json", std::ios::binary);
  out << j.dump(2) << '\n';
}

namespace {

class Stopwatch {
 public:
  double lap() {
    const auto now = std::chrono::steady_clock::now();
    const double s = std::chrono::duration<double>(now - last_).count();
    last_ = now;
    return s;
  }

 private:
  std::chrono::steady_clock::time_point last_ = std::chrono::steady_clock::now();
};

// json.dump() cannot carry infinities.
json number(double v) {
  if (std::isfinite(v)) return v;
  return csv::format(v);
}

std::string trace_csv(const BoundaryTrace& tr, int side) {
  std::ostringstream os;
  write_trace_csv(os, tr, side);
  return os.str();
}

std::string profile_csv(const SampledFunction1D& f) {
  std::ostringstream os;
  write_profile_csv(os, f);
  return os.str();
}

}  // namespace

// ---------------------------------------------------------------------------
// forward

int cmd_forward(const ExperimentConfig& cfg, std::ostream& log) {
  cfg.validate();
  const Grid2D g(cfg.n);
  const DampingPair a = make_damping(cfg.damping, cfg.n);
  require_mode_resolved(g, cfg.mode);
  RunManifest man(cfg.out, cfg, "forward");
  Stopwatch sw;

  const Field phi = mode_field(g, cfg.mode);
  const SolveResult run = solve(g, phi, Field(g.size(), 0.0), a, nullptr, cfg.tau, cfg.dt_factor);
  man.time("solve", sw.lap());

  std::ostringstream energy;
  energy << "t,energy\n";
  double drift = 0.0;
  for (std::size_t k = 0; k < run.times.size(); ++k) {
    energy << csv::format(run.times[k]) << ',' << csv::format(run.energy[k]) << '\n';
    drift = std::max(drift, std::abs(run.energy[k] - run.energy.front()) / run.energy.front());
  }
  man.emit("energy.csv", energy.str());
  man.emit("trace11.csv", trace_csv(run.trace, 0));
  man.emit("trace12.csv", trace_csv(run.trace, 1));
  std::ostringstream bin;
  write_trace_binary(bin, run.trace);
  man.emit("trace.bin", bin.str());

  json s;
  s["n"] = cfg.n;
  s["tau"] = cfg.tau;
  s["dt"] = run.dt;
  s["steps"] = run.trace.steps;
  s["mode"] = {cfg.mode.k, cfg.mode.l};
  s["energy_initial"] = run.energy.front();
  s["energy_final"] = run.energy.back();
  s["max_relative_energy_change"] = drift;
  s["dissipation_residual"] = dissipation_residual(run, g, a);
  s["trace_l2"] = run.trace.l2_norm();
  if (a.min() > 0.0) {
    const DecayFit fit = fit_decay(run.times, run.energy);
    s["decay"] = {{"omega_fit", fit.omega_fit}, {"M_fit", fit.M_fit}, {"residual", fit.residual}};
    log << "decay: omega_fit = " << fit.omega_fit << ", M_fit = " << fit.M_fit << '\n';
  }
  man.emit("summary.json", s.dump(2) + "\n");
  man.time("write", sw.lap());
  man.write();
  log << "forward: " << run.trace.steps << " steps, E(0) = " << run.energy.front()
      << ", E(tau) = " << run.energy.back() << '\n';
  return kExitOk;
}

// ---------------------------------------------------------------------------
// reconstruct

int cmd_reconstruct(const ExperimentConfig& cfg, std::ostream& log) {
  cfg.validate();
  const Grid2D g(cfg.n);
  const DampingPair truth = make_damping(cfg.damping, cfg.n);
  RunManifest man(cfg.out, cfg, "reconstruct");
  Stopwatch sw;

  const BoundaryTrace ref = reference_trace(g, cfg.probe_mode, cfg.tau, cfg.dt_factor);
  const ModalMeasurement meas = probe_mode(g, truth, cfg.probe_mode, cfg.tau, ref, cfg.dt_factor);
  const double floor = ref.l2_norm();
  const bool below_floor = meas.trace_norm <= 10.0 * floor;
  man.time("probe", sw.lap());

  const LinearizedEstimate est = linearized_recover(time_project(meas), cfg.guard);
  const DampingPair trunc = truncate(est.damping, cfg.N);
  const auto c1 = fourier_project(est.damping.a1(), cfg.N, Side::Gamma11);
  const auto c2 = fourier_project(est.damping.a2(), cfg.N, Side::Gamma12);
  man.emit("recon_a1.csv", profile_csv(est.damping.a1()));
  man.emit("recon_a2.csv", profile_csv(est.damping.a2()));
  std::ostringstream fc;
  fc << "side,k,coefficient\n";
  for (int k = 0; k <= cfg.N; ++k) fc << "1," << k << ',' << csv::format(c1.coeffs[k]) << '\n';
  for (int k = 0; k <= cfg.N; ++k) fc << "2," << k << ',' << csv::format(c2.coeffs[k]) << '\n';
  man.emit("fourier.csv", fc.str());
  man.time("linearized", sw.lap());

  const double truth_norm = guarded_l2_norm(truth, cfg.guard);
  auto rel = [&](const DampingPair& x) {
    const double d = guarded_l2_distance(x, truth, cfg.guard);
    return truth_norm > 0.0 ? d / truth_norm : d;
  };
  json s;
  s["probe_mode"] = {cfg.probe_mode.k, cfg.probe_mode.l};
  s["trace_l2"] = meas.trace_norm;
  s["noise_floor"] = floor;
  s["below_noise_floor"] = below_floor;
  s["error_metric"] = truth_norm > 0.0 ? "relative_l2_unguarded" : "absolute_l2_unguarded";
  s["linearized_error"] = rel(est.damping);
  s["truncated_error"] = rel(trunc);

  if (cfg.ls_iters > 0) {
    LeastSquaresConfig lc;
    lc.iters = cfg.ls_iters;
    lc.order = cfg.N;
    lc.tau = cfg.tau;
    lc.dt_factor = cfg.dt_factor;
    const std::vector<ModalMeasurement> ms{meas};
    const auto ls = fit_damping_least_squares(g, ms, est.damping, lc);
    man.emit("recon_ls_a1.csv", profile_csv(ls.estimate.a1()));
    man.emit("recon_ls_a2.csv", profile_csv(ls.estimate.a2()));
    s["least_squares"] = {{"initial_residual", ls.initial_residual},
                          {"final_residual", ls.final_residual},
                          {"iterations", ls.iterations},
                          {"stalled", ls.stalled},
                          {"error", rel(ls.estimate)}};
    man.time("least_squares", sw.lap());
  }
  man.emit("summary.json", s.dump(2) + "\n");
  man.write();
  if (below_floor) log << "reconstruct: measurement below noise floor\n";
  log << "reconstruct: linearized error " << s["linearized_error"].get<double>() << '\n';
  return kExitOk;
}

// ---------------------------------------------------------------------------
// sweep

namespace {

std::string sweep_svg(const SweepResult& r, const std::vector<std::pair<double, double>>& curve) {
  std::vector<std::pair<double, double>> pts;
  for (const auto& rec : r.records) {
    if (rec.delta > 0.0 && rec.a_l2 > 0.0) pts.emplace_back(rec.delta, rec.a_l2);
  }
  std::vector<std::pair<double, double>> all = pts;
  all.insert(all.end(), curve.begin(), curve.end());
  std::ostringstream os;
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"480\" height=\"360\">\n";
  if (all.empty()) {
    os << "</svg>\n";
    return os.str();
  }
  double x0 = 1e300, x1 = -1e300, y0 = 1e300, y1 = -1e300;
  for (const auto& [x, y] : all) {
    x0 = std::min(x0, std::log10(x));
    x1 = std::max(x1, std::log10(x));
    y0 = std::min(y0, std::log10(y));
    y1 = std::max(y1, std::log10(y));
  }
  if (x1 - x0 < 1e-9) x1 = x0 + 1;
  if (y1 - y0 < 1e-9) y1 = y0 + 1;
  auto px = [&](double x) { return 50.0 + 400.0 * (std::log10(x) - x0) / (x1 - x0); };
  auto py = [&](double y) { return 320.0 - 280.0 * (std::log10(y) - y0) / (y1 - y0); };
  os << "<rect x=\"50\" y=\"40\" width=\"400\" height=\"280\" fill=\"none\" stroke=\"black\"/>\n";
  os << "<text x=\"250\" y=\"350\" text-anchor=\"middle\">delta (log)</text>\n";
  os << "<text x=\"15\" y=\"180\" transform=\"rotate(-90 15 180)\" text-anchor=\"middle\">||a|| (log)</text>\n";
  if (!curve.empty()) {
    os << "<polyline fill=\"none\" stroke=\"steelblue\" points=\"";
    for (const auto& [x, y] : curve) os << csv::format(px(x)) << ',' << csv::format(py(y)) << ' ';
    os << "\"/>\n";
  }
  for (const auto& [x, y] : pts) {
    os << "<circle cx=\"" << csv::format(px(x)) << "\" cy=\"" << csv::format(py(y))
       << "\" r=\"4\" fill=\"firebrick\"/>\n";
  }
  os << "</svg>\n";
  return os.str();
}

}  // namespace

int cmd_sweep(const ExperimentConfig& cfg, std::ostream& log) {
  cfg.validate();
  if (cfg.epsilons.size() < 2) throw ConfigError("epsilons: a sweep needs at least two members");
  const Grid2D g(cfg.n);
  const DampingPair base = make_damping(cfg.sweep_base, cfg.n);
  const auto family = scaled_family(base, cfg.epsilons);
  RunManifest man(cfg.out, cfg, "sweep");
  Stopwatch sw;

  SweepConfig sc;
  sc.tau = cfg.tau;
  sc.dt_factor = cfg.dt_factor;
  sc.K = cfg.K;
  sc.N = cfg.N;
  sc.guard = cfg.guard;
  sc.calibration = cfg.calibration;
  const SweepResult res = stability_sweep(g, family, sc);
  man.time("sweep", sw.lap());

  std::ostringstream csv_out;
  write_sweep_csv(csv_out, res);
  man.emit("sweep.csv", csv_out.str());

  // Member points plus the calibrated bound on a log-spaced delta grid.
  const auto& k = res.constants;
  std::vector<std::pair<double, double>> curve;
  double dmin = 1e300, dmax = 0.0;
  for (const auto& rec : res.records) {
    if (rec.delta > 0.0) {
      dmin = std::min(dmin, rec.delta);
      dmax = std::max(dmax, rec.delta);
    }
  }
  if (k.c_cal > 0.0 && dmax > 0.0) {
    const double lo = std::log(0.5 * dmin), hi = std::log(1.5 * dmax);
    for (int i = 0; i <= 40; ++i) {
      const double d = std::exp(lo + (hi - lo) * i / 40.0);
      if (std::abs(d - k.m) <= 1e-9 * k.m) continue;
      curve.emplace_back(d, stability_rhs(d, k.m, k.M, k.c_cal));
    }
  }
  std::ostringstream plot;
  plot << "series,delta,value\n";
  for (const auto& rec : res.records) {
    plot << "member," << csv::format(rec.delta) << ',' << csv::format(rec.a_l2) << '\n';
  }
  for (const auto& [d, v] : curve) plot << "bound," << csv::format(d) << ',' << csv::format(v) << '\n';
  man.emit("sweep_plot.csv", plot.str());
  if (cfg.svg) man.emit("sweep.svg", sweep_svg(res, curve));

  json c;
  c["m"] = number(k.m);
  c["M"] = number(k.M);
  c["alpha"] = k.alpha;
  c["c_cal"] = number(k.c_cal);
  c["C_trunc"] = number(k.C_trunc);
  c["C_emp"] = number(k.C_emp);
  c["calibration"] = family[cfg.calibration].id;
  man.emit("constants.json", c.dump(2) + "\n");
  man.write();

  for (const auto& rec : res.records) {
    log << rec.damping_id << " eps=" << rec.epsilon << " delta=" << rec.delta
        << " |a|=" << rec.a_l2 << " bound=" << rec.bound_rhs << " N0=" << rec.N0 << '\n';
  }
  return kExitOk;
}

// ---------------------------------------------------------------------------
// verify

namespace {

std::vector<double> random_smooth(std::mt19937_64& rng, std::size_t steps, double tau) {
  std::normal_distribution<double> nd(0.0, 1.0);
  std::vector<double> amp(8), ph(8);
  for (int j = 0; j < 8; ++j) {
    amp[j] = nd(rng) / (1.0 + j);
    ph[j] = 2.0 * std::numbers::pi * std::uniform_real_distribution<double>(0, 1)(rng);
  }
  std::vector<double> v(steps + 1);
  for (std::size_t i = 0; i <= steps; ++i) {
    const double t = tau * static_cast<double>(i) / static_cast<double>(steps);
    double acc = 0.0;
    for (int j = 0; j < 8; ++j) acc += amp[j] * std::cos(j * std::numbers::pi * t / tau + ph[j]);
    v[i] = acc;
  }
  return v;
}

}  // namespace

std::vector<CheckResult> run_checks(const ExperimentConfig& cfg, const std::string& prefix) {
  const double ts = cfg.tolerance_scale;
  std::vector<CheckResult> out;
  auto want = [&](const std::string& name) { return name.rfind(prefix, 0) == 0; };
  auto add = [&](std::string name, double value, double tol) {
    out.push_back({std::move(name), value, tol, value <= tol});
  };
  std::mt19937_64 rng(cfg.seed);

  const std::size_t steps = 512;
  const double tau = 3.0;
  const auto lam = Modulation::from_function([](double t) { return std::cos(2.0 * t); }, tau, steps);
  const double dt = tau / steps;

  if (want("adjoint.s_sstar")) {
    double worst = 0.0;
    for (int r = 0; r < 20; ++r) {
      const TimeSignal h(random_smooth(rng, steps, tau), 1, dt);
      const TimeSignal q(random_smooth(rng, steps, tau), 1, dt);
      const double lhs = convolve_S(lam, h).inner(q);
      const double rhs = h.inner(convolve_Sstar(lam, q));
      worst = std::max(worst, std::abs(lhs - rhs) / (h.l2_norm() * q.l2_norm()));
    }
    add("adjoint.s_sstar", worst, 1e-8 * ts);
  }
  if (want("causality")) {
    std::vector<double> base = random_smooth(rng, steps, tau), bumped = base;
    const std::size_t cut = steps / 2;
    for (std::size_t i = cut + 1; i <= steps; ++i) bumped[i] += 1.0;
    const TimeSignal h0(base, 1, dt), h1(bumped, 1, dt);
    const auto s0 = convolve_S(lam, h0), s1 = convolve_S(lam, h1);
    double diff = 0;
    for (std::size_t i = 0; i <= cut; ++i) diff += (s0(i, 0) != s1(i, 0));
    if (want("causality.s")) add("causality.s", diff, 0.0);
    std::vector<double> early = base;
    for (std::size_t i = 0; i < cut; ++i) early[i] -= 1.0;
    const auto a0 = convolve_Sstar(lam, h0), a1 = convolve_Sstar(lam, TimeSignal(early, 1, dt));
    double adiff = 0;
    for (std::size_t i = cut; i <= steps; ++i) adiff += (a0(i, 0) != a1(i, 0));
    if (want("causality.sstar")) add("causality.sstar", adiff, 0.0);
  }
  if (want("gronwall.bound")) {
    double worst = 0.0;
    for (int r = 0; r < 20; ++r) {
      const auto chk = gronwall_bound_check(lam, TimeSignal(random_smooth(rng, steps, tau), 1, dt));
      worst = std::max(worst, chk.lhs / chk.rhs);
    }
    add("gronwall.bound", worst, 1.0 * ts);
  }
  if (want("rellich")) {
    const std::pair<double, double> x0{1.25, 1.25};
    const Grid2D g33(33), g65(65);
    if (want("rellich.linear")) {
      const auto r = rellich_residual(g33, sample_field(g33, [](double x, double) { return x; }), x0);
      add("rellich.linear", r.residual / r.scale, 1e-8 * ts);
    }
    if (want("rellich.constant")) {
      const auto r = rellich_residual(g33, Field(g33.size(), 1.0), x0);
      add("rellich.constant", r.residual, 1e-8 * ts);
    }
    if (want("rellich.refinement")) {
      const auto r33 = rellich_residual(g33, mode_field(g33, {0, 0}), x0);
      const auto r65 = rellich_residual(g65, mode_field(g65, {0, 0}), x0);
      add("rellich.refinement", r65.residual / r33.residual, 1.0 * ts);
    }
  }
  const Grid2D g(33);
  const Field phi = mode_field(g, {0, 0});
  const Field zero(g.size(), 0.0);
  if (want("dissipation.identity")) {
    const auto a = DampingPair::constant(1.0, g.n());
    const auto run = solve(g, phi, zero, a, nullptr, 1.0);
    add("dissipation.identity", dissipation_residual(run, g, a), 1e-2 * ts);
  }
  if (want("energy")) {
    if (want("energy.conservation")) {
      const auto run = solve(g, phi, zero, DampingPair::zero(g.n()), nullptr, 4.0);
      double drift = 0.0;
      for (double e : run.energy) drift = std::max(drift, std::abs(e - run.energy[0]) / run.energy[0]);
      add("energy.conservation", drift, 1e-3 * ts);
    }
    if (want("energy.monotone")) {
      const auto run = solve(g, phi, zero, DampingPair::constant(0.5, g.n()), nullptr, 4.0);
      double rise = 0.0;
      for (std::size_t k = 1; k < run.staggered_energy.size(); ++k) {
        rise = std::max(rise, run.staggered_energy[k] - run.staggered_energy[k - 1]);
      }
      add("energy.monotone", rise / run.energy[0], 1e-12 * ts);
    }
  }
  if (want("multiplier.bound")) {
    std::uniform_real_distribution<double> u(0.0, 1.0);
    double worst = 0.0;
    for (int r = 0; r < 20; ++r) {
      const double alpha = 0.55 + 0.45 * u(rng);
      const double c0 = u(rng), c1 = u(rng), w = 1.0 + 6.0 * u(rng);
      const double f0 = u(rng), f1 = u(rng), fw = 1.0 + 8.0 * u(rng);
      const auto a = SampledFunction1D::sample([&](double s) { return c0 + c1 * std::sin(w * s); }, 257);
      const auto f = SampledFunction1D::sample([&](double s) { return f0 + f1 * std::cos(fw * s); }, 257);
      const auto chk = multiplier_bound_check(a, f, alpha);
      worst = std::max(worst, chk.rhs > 0 ? chk.lhs / chk.rhs : 0.0);
    }
    add("multiplier.bound", worst, 1.0 * ts);
  }
  if (want("n0.bracketing")) {
    double failures = 0.0;
    if (select_N0(1.0, 1.0, 2.0, std::exp(-18.0)) != 2) failures += 1;
    for (double d = 1e-10; d > 1e-300; d *= 1e-7) {
      const int n0 = select_N0(1.0, 1.0, 2.0, d);
      if (!truncation_rule_holds(1.0, 1.0, 2.0, d, n0)) failures += 1;
      if (truncation_rule_holds(1.0, 1.0, 2.0, d, n0 + 1)) failures += 1;
    }
    add("n0.bracketing", failures, 0.0);
  }
  if (want("riesz.dual_norm")) {
    const auto r = riesz_solve(g, stiffness_functional(g, phi));
    double err = 0.0;
    for (std::size_t p = 0; p < phi.size(); ++p) err = std::max(err, std::abs(r.z[p] - phi[p]));
    add("riesz.dual_norm", err / 2.0, 1e-6 * ts);
  }
  if (want("compat.linear")) {
    const auto t = SampledFunction1D::sample([](double s) { return s; }, 1025);
    const auto r = compat_integral(t, SampledFunction1D::constant(0.0, 1025));
    add("compat.linear", std::abs(r.value - 0.5) + (r.divergent ? 1.0 : 0.0), 1e-5 * ts);
  }
  return out;
}

int cmd_verify(const ExperimentConfig& cfg, const std::string& prefix, std::ostream& log) {
  cfg.validate();
  Stopwatch sw;
  const auto checks = run_checks(cfg, prefix);
  if (checks.empty()) throw ConfigError("filter: no check name starts with '" + prefix + "'");
  RunManifest man(cfg.out, cfg, "verify");
  man.time("checks", sw.lap());

  std::ostringstream table;
  table << "name,value,tolerance,pass\n";
  bool all = true;
  for (const auto& c : checks) {
    table << c.name << ',' << csv::format(c.value) << ',' << csv::format(c.tolerance) << ','
          << (c.pass ? "true" : "false") << '\n';
    log << std::left << std::setw(24) << c.name << std::setw(14) << c.value << std::setw(12)
        << c.tolerance << (c.pass ? "PASS" : "FAIL") << '\n';
    all = all && c.pass;
  }
  man.emit("verify.csv", table.str());
  man.write();
  if (!all) {
    log << "failed:";
    for (const auto& c : checks) {
      if (!c.pass) log << ' ' << c.name;
    }
    log << '\n';
    return kExitFailure;
  }
  return kExitOk;
}

}  // namespace dampinv
