#pragma once

// Experiment commands behind the command-line tool. Each command writes its
// artifacts into the configured output directory and finishes with a
// manifest listing every file and its SHA-256.

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "dampinv/config.hpp"

namespace dampinv {

inline constexpr const char* kToolVersion = "0.3.0";

enum ExitCode : int { kExitOk = 0, kExitFailure = 1, kExitConfig = 2 };

/// Hex SHA-256 of a byte string / file.
std::string sha256_hex(std::string_view bytes);
std::string sha256_file(const std::filesystem::path& path);

/// Collects artifacts and timings; write() emits manifest.json last.
class RunManifest {
 public:
  RunManifest(std::filesystem::path dir, const ExperimentConfig& cfg, std::string command);

  /// Writes `contents` to dir/name and records it.
  void emit(const std::string& name, const std::string& contents);
  void time(const std::string& stage, double seconds);
  void write() const;

  const std::filesystem::path& dir() const { return dir_; }

 private:
  std::filesystem::path dir_;
  std::string config_hash_;
  std::string command_;
  std::vector<std::string> files_;
  std::vector<std::pair<std::string, double>> timings_;
};

struct CheckResult {
  std::string name;
  double value = 0.0;
  double tolerance = 0.0;
  bool pass = false;
};

/// The invariant suite behind `verify`, restricted to names starting with
/// `prefix`. Tolerances are multiplied by cfg.tolerance_scale.
std::vector<CheckResult> run_checks(const ExperimentConfig& cfg, const std::string& prefix);

int cmd_forward(const ExperimentConfig& cfg, std::ostream& log);
int cmd_reconstruct(const ExperimentConfig& cfg, std::ostream& log);
int cmd_sweep(const ExperimentConfig& cfg, std::ostream& log);
int cmd_verify(const ExperimentConfig& cfg, const std::string& prefix, std::ostream& log);

/// Maps library exceptions to exit codes and prints the message.
template <typename F>
int guarded(F&& body, std::ostream& err) {
  try {
    return body();
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return kExitFailure;
  }
}

}  // namespace dampinv
