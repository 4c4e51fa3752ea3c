#include "dampinv/config.hpp"

#include <charconv>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

#include "dampinv/csv.hpp"
#include "dampinv/reconstruction.hpp"

namespace dampinv {

namespace {

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

double to_double(const std::string& key, const std::string& v) {
  try {
    return csv::parse_double(v);
  } catch (const Error&) {
    throw ConfigError(key + ": expected a number, got '" + v + "'");
  }
}

template <typename Int>
Int to_int(const std::string& key, const std::string& v) {
  Int out{};
  auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc{} || p != v.data() + v.size()) {
    throw ConfigError(key + ": expected an integer, got '" + v + "'");
  }
  return out;
}

ModeIndex to_mode(const std::string& key, const std::string& v) {
  const auto comma = v.find(',');
  if (comma == std::string::npos) throw ConfigError(key + ": expected 'k,l', got '" + v + "'");
  const ModeIndex m{to_int<int>(key, trim(v.substr(0, comma))),
                    to_int<int>(key, trim(v.substr(comma + 1)))};
  if (m.k < 0 || m.l < 0) throw ConfigError(key + ": mode indices must be >= 0");
  return m;
}

std::vector<double> to_list(const std::string& key, const std::string& v) {
  std::vector<double> out;
  for (auto part : csv::split(v)) out.push_back(to_double(key, trim(part)));
  return out;
}

bool to_bool(const std::string& key, const std::string& v) {
  if (v == "true" || v == "1") return true;
  if (v == "false" || v == "0") return false;
  throw ConfigError(key + ": expected true or false, got '" + v + "'");
}

std::string join(const std::vector<double>& xs) {
  std::string s;
  for (std::size_t i = 0; i < xs.size(); ++i) s += (i ? "," : "") + csv::format(xs[i]);
  return s;
}

SampledFunction1D load_profile(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("damping: cannot open '" + path + "'");
  try {
    return read_profile_csv(in);
  } catch (const InvalidArgument& e) {
    throw ConfigError("damping: " + path + ": " + e.what());
  }
}

}  // namespace

void ExperimentConfig::validate() const {
  if (n < 17) throw ConfigError("n: must be >= 17, got " + std::to_string(n));
  if (!(tau > 0.0)) throw ConfigError("tau: must be > 0");
  if (!(dt_factor > 0.0 && dt_factor <= 0.5)) throw ConfigError("dt_factor: must lie in (0, 0.5]");
  if (!(guard >= 0.0 && guard <= 0.5)) throw ConfigError("guard: must lie in [0, 0.5]");
  if (K < 0) throw ConfigError("K: must be >= 0");
  if (N < 0) throw ConfigError("N: must be >= 0");
  if (N > 4) throw ConfigError("N: least-squares and truncation order must be <= 4");
  if (ls_iters < 0) throw ConfigError("ls_iters: must be >= 0");
  if (!(tolerance_scale >= 0.0)) throw ConfigError("tolerance_scale: must be >= 0");
  if (epsilons.empty()) throw ConfigError("epsilons: empty list");
  for (double e : epsilons) {
    if (!(e >= 0.0)) throw ConfigError("epsilons: entries must be >= 0");
  }
  if (calibration >= epsilons.size()) throw ConfigError("calibration: index beyond epsilons");
  if (out.empty()) throw ConfigError("out: empty path");
  // Damping specs are checked for syntax here; csv files load lazily.
  for (const auto* spec : {&damping, &sweep_base}) {
    if (spec->rfind("csv:", 0) == 0) continue;
    try {
      make_damping(*spec, 17);
    } catch (const ConfigError& e) {
      throw ConfigError((spec == &damping ? "damping: " : "sweep_base: ") + std::string(e.what()));
    }
  }
}

std::string ExperimentConfig::canonical() const {
  std::ostringstream os;
  os << "n = " << n << '\n'
     << "tau = " << csv::format(tau) << '\n'
     << "dt_factor = " << csv::format(dt_factor) << '\n'
     << "damping = " << damping << '\n'
     << "mode = " << mode.k << ',' << mode.l << '\n'
     << "probe_mode = " << probe_mode.k << ',' << probe_mode.l << '\n'
     << "K = " << K << '\n'
     << "N = " << N << '\n'
     << "guard = " << csv::format(guard) << '\n'
     << "calibration = " << calibration << '\n'
     << "sweep_base = " << sweep_base << '\n'
     << "epsilons = " << join(epsilons) << '\n'
     << "ls_iters = " << ls_iters << '\n'
     << "seed = " << seed << '\n'
     << "tolerance_scale = " << csv::format(tolerance_scale) << '\n'
     << "svg = " << (svg ? "true" : "false") << '\n'
     << "out = " << out.string() << '\n';
  return os.str();
}

ExperimentConfig parse_config(std::istream& is) {
  ExperimentConfig c;
  using Setter = std::function<void(const std::string&, const std::string&)>;
  const std::map<std::string, Setter> setters{
      {"n", [&](auto& k, auto& v) { c.n = to_int<std::size_t>(k, v); }},
      {"tau", [&](auto& k, auto& v) { c.tau = to_double(k, v); }},
      {"dt_factor", [&](auto& k, auto& v) { c.dt_factor = to_double(k, v); }},
      {"damping", [&](auto&, auto& v) { c.damping = v; }},
      {"mode", [&](auto& k, auto& v) { c.mode = to_mode(k, v); }},
      {"probe_mode", [&](auto& k, auto& v) { c.probe_mode = to_mode(k, v); }},
      {"K", [&](auto& k, auto& v) { c.K = to_int<int>(k, v); }},
      {"N", [&](auto& k, auto& v) { c.N = to_int<int>(k, v); }},
      {"guard", [&](auto& k, auto& v) { c.guard = to_double(k, v); }},
      {"calibration", [&](auto& k, auto& v) { c.calibration = to_int<std::size_t>(k, v); }},
      {"sweep_base", [&](auto&, auto& v) { c.sweep_base = v; }},
      {"epsilons", [&](auto& k, auto& v) { c.epsilons = to_list(k, v); }},
      {"ls_iters", [&](auto& k, auto& v) { c.ls_iters = to_int<int>(k, v); }},
      {"seed", [&](auto& k, auto& v) { c.seed = to_int<std::uint64_t>(k, v); }},
      {"tolerance_scale", [&](auto& k, auto& v) { c.tolerance_scale = to_double(k, v); }},
      {"svg", [&](auto& k, auto& v) { c.svg = to_bool(k, v); }},
      {"out", [&](auto&, auto& v) { c.out = v; }},
  };

  std::string line;
  int lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.resize(hash);
    const std::string body = trim(line);
    if (body.empty()) continue;
    const auto eq = body.find('=');
    if (eq == std::string::npos) {
      throw ConfigError("line " + std::to_string(lineno) + ": expected 'key = value'");
    }
    const std::string key = trim(body.substr(0, eq));
    const std::string value = trim(body.substr(eq + 1));
    const auto it = setters.find(key);
    if (it == setters.end()) throw ConfigError(key + ": unknown key (line " + std::to_string(lineno) + ")");
    it->second(key, value);
  }
  return c;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("config: cannot open '" + path.string() + "'");
  return parse_config(in);
}

DampingPair make_damping(const std::string& spec, std::size_t n) {
  const auto colon = spec.find(':');
  const std::string kind = spec.substr(0, colon);
  const std::string args = colon == std::string::npos ? "" : spec.substr(colon + 1);
  try {
    if (kind == "zero" && args.empty()) return DampingPair::zero(n);
    if (kind == "constant") {
      const auto v = to_list("constant", args);
      if (v.size() != 1) throw ConfigError("constant:c takes one value");
      return DampingPair::constant(v[0], n);
    }
    if (kind == "affine") {
      const auto v = to_list("affine", args);
      if (v.size() != 3) throw ConfigError("affine:c,s1,s2 takes three values");
      return DampingPair(SampledFunction1D::sample([&](double s) { return v[0] * (1.0 + v[1] * s); }, n),
                         SampledFunction1D::sample([&](double s) { return v[0] * (1.0 + v[2] * s); }, n));
    }
    if (kind == "csv") {
      const auto comma = args.find(',');
      if (comma == std::string::npos) throw ConfigError("csv:SIDE1,SIDE2 needs two paths");
      auto a1 = load_profile(args.substr(0, comma));
      auto a2 = load_profile(args.substr(comma + 1));
      if (a1.size() != n) a1 = a1.resampled(n);
      if (a2.size() != n) a2 = a2.resampled(n);
      return DampingPair(a1, a2, DampingPair::reconstructed_corner_tol(a1, a2));
    }
  } catch (const ConfigError&) {
    throw;
  } catch (const Error& e) {
    throw ConfigError(std::string("invalid damping '") + spec + "': " + e.what());
  }
  throw ConfigError("unknown damping spec '" + spec + "'");
}

}  // namespace dampinv
