#include "doctest.h"

#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include <unistd.h>

#include "json.hpp"

#include "dampinv/config.hpp"
#include "dampinv/harness.hpp"
#include "dampinv/reconstruction.hpp"

using namespace dampinv;
namespace fs = std::filesystem;

namespace {

struct TempDir {
  fs::path path;
  explicit TempDir(const std::string& tag)
      : path(fs::temp_directory_path() / ("dampinv_" + tag + "_" + std::to_string(::getpid()))) {
    fs::remove_all(path);
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
};

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

ExperimentConfig parse(const std::string& text) {
  std::istringstream is(text);
  return parse_config(is);
}

std::string config_error(const std::string& text) {
  try {
    parse(text).validate();
  } catch (const ConfigError& e) {
    return e.what();
  }
  return "";
}

/// Every file in the directory is listed in the manifest with a matching digest.
void check_manifest(const fs::path& dir) {
  const auto j = nlohmann::json::parse(slurp(dir / "manifest.json"));
  std::set<std::string> listed;
  for (const auto& f : j["files"]) {
    const std::string name = f["name"];
    listed.insert(name);
    CHECK(f["sha256"] == sha256_file(dir / name));
    CHECK(f["bytes"].get<std::uintmax_t>() == fs::file_size(dir / name));
  }
  for (const auto& e : fs::directory_iterator(dir)) {
    const auto name = e.path().filename().string();
    if (name != "manifest.json") CHECK(listed.count(name) == 1);
  }
  CHECK(j["version"] == kToolVersion);
}

}  // namespace

TEST_CASE("config parsing and validation") {
  const auto cfg = parse("# comment\nn = 33\ntau=2.5\n\nepsilons = 0.5, 0.25\nmode = 1,0\nsvg = true\n");
  CHECK(cfg.n == 33);
  CHECK(cfg.tau == 2.5);
  CHECK(cfg.epsilons == std::vector<double>{0.5, 0.25});
  CHECK(cfg.mode == ModeIndex{1, 0});
  CHECK(cfg.svg);
  CHECK_NOTHROW(cfg.validate());
  CHECK(parse(cfg.canonical()).canonical() == cfg.canonical());

  CHECK(config_error("n = 5\n").find("n") != std::string::npos);
  CHECK(config_error("bogus = 1\n").find("bogus") != std::string::npos);
  CHECK(config_error("tau = -1\n").find("tau") != std::string::npos);
  CHECK(config_error("dt_factor = 0.7\n").find("dt_factor") != std::string::npos);
  CHECK(config_error("guard = 0.6\n").find("guard") != std::string::npos);
  CHECK(config_error("damping = wobbly\n").find("damping") != std::string::npos);
  CHECK(config_error("n = many\n").find("n") != std::string::npos);
  CHECK(config_error("no equals sign\n") != "");
}

TEST_CASE("damping specs") {
  CHECK(make_damping("zero", 17).is_zero());
  CHECK(make_damping("constant:0.25", 17).min() == 0.25);
  const auto a = make_damping("affine:2,0.5,1", 17);
  CHECK(a.a1()[16] == doctest::Approx(3.0));
  CHECK(a.a2()[16] == doctest::Approx(4.0));
  CHECK(a.corner() == 2.0);
  CHECK_THROWS_AS(make_damping("affine:1", 17), ConfigError);

  TempDir tmp("spec");
  const auto truth = make_damping("affine:0.1,0.5,0", 33);
  for (int side : {1, 2}) {
    std::ofstream out(tmp.path / ("a" + std::to_string(side) + ".csv"));
    write_profile_csv(out, side == 1 ? truth.a1() : truth.a2());
  }
  const auto spec = "csv:" + (tmp.path / "a1.csv").string() + "," + (tmp.path / "a2.csv").string();
  const auto loaded = make_damping(spec, 33);
  CHECK(std::equal(loaded.a1().values().begin(), loaded.a1().values().end(), truth.a1().values().begin()));
  CHECK(std::equal(loaded.a2().values().begin(), loaded.a2().values().end(), truth.a2().values().begin()));
  CHECK(make_damping(spec, 65).size() == 65);
}

TEST_CASE("sha256 matches the standard test vector") {
  CHECK(sha256_hex("abc") == "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
}

TEST_CASE("forward command") {
  TempDir tmp("fwd");
  ExperimentConfig cfg;
  cfg.n = 33;
  cfg.damping = "zero";
  cfg.out = tmp.path;
  std::ostringstream log;
  CHECK(cmd_forward(cfg, log) == kExitOk);
  const auto s = nlohmann::json::parse(slurp(tmp.path / "summary.json"));
  CHECK(s["max_relative_energy_change"].get<double>() <= 1e-3);
  CHECK(fs::exists(tmp.path / "trace.bin"));
  check_manifest(tmp.path);

  cfg.n = 5;
  std::ostringstream err;
  CHECK(guarded([&] { return cmd_forward(cfg, log); }, err) == kExitConfig);
  CHECK(err.str().find("n") != std::string::npos);
}

TEST_CASE("reconstruct command flags the noise floor") {
  TempDir tmp("rec");
  ExperimentConfig cfg;
  cfg.n = 33;
  cfg.damping = "zero";
  cfg.out = tmp.path;
  std::ostringstream log;
  CHECK(cmd_reconstruct(cfg, log) == kExitOk);
  const auto s = nlohmann::json::parse(slurp(tmp.path / "summary.json"));
  CHECK(s["below_noise_floor"].get<bool>());
  CHECK(fs::exists(tmp.path / "fourier.csv"));
  check_manifest(tmp.path);
}

TEST_CASE("sweep command is deterministic and needs two members") {
  TempDir tmp("sweep");
  ExperimentConfig cfg;
  cfg.n = 33;
  cfg.svg = true;
  std::ostringstream log;
  cfg.out = tmp.path / "one";
  CHECK(cmd_sweep(cfg, log) == kExitOk);
  cfg.out = tmp.path / "two";
  CHECK(cmd_sweep(cfg, log) == kExitOk);
  for (const char* f : {"sweep.csv", "sweep_plot.csv", "sweep.svg", "constants.json"}) {
    CHECK(slurp(tmp.path / "one" / f) == slurp(tmp.path / "two" / f));
  }
  check_manifest(tmp.path / "one");

  cfg.epsilons = {0.4};
  CHECK_THROWS_AS(cmd_sweep(cfg, log), ConfigError);
}

TEST_CASE("invariant checks") {
  ExperimentConfig cfg;
  const auto all = run_checks(cfg, "");
  CHECK(all.size() >= 10);
  for (const auto& c : all) {
    INFO(c.name << " = " << c.value << " (tolerance " << c.tolerance << ")");
    CHECK(c.pass);
  }
  const auto rel = run_checks(cfg, "rellich");
  CHECK(rel.size() == 3);
  for (const auto& c : rel) CHECK(c.name.rfind("rellich", 0) == 0);

  cfg.tolerance_scale = 0.0;
  int failed = 0;
  for (const auto& c : run_checks(cfg, "")) failed += !c.pass;
  CHECK(failed >= 1);
}
