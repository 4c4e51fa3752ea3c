#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "dampinv/error.hpp"
#include "dampinv/spectral.hpp"

namespace dampinv {

/// Invalid or unknown configuration entry. The message names the field.
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// Flat `key = value` experiment configuration. Unknown keys are rejected.
///
/// Damping specs: `zero`, `constant:c`, `affine:c,s1,s2` for
/// a1(s) = c (1 + s1 s), a2(s) = c (1 + s2 s), or `csv:SIDE1,SIDE2` naming two
/// profile files with header `s,value`.
struct ExperimentConfig {
  std::size_t n = 65;
  double tau = 4.0;
  double dt_factor = 0.5;
  std::string damping = "affine:0.1,0.5,0";
  ModeIndex mode{0, 0};        // forward initial datum
  ModeIndex probe_mode{0, 0};  // recovery probe
  int K = 2;
  int N = 4;
  double guard = 0.2;
  std::size_t calibration = 0;
  std::string sweep_base = "affine:1,0.5,0";
  std::vector<double> epsilons{0.4, 0.2, 0.1, 0.05};
  int ls_iters = 0;
  std::uint64_t seed = 20240601;
  double tolerance_scale = 1.0;
  bool svg = false;
  std::filesystem::path out = "out";

  /// Throws ConfigError naming the first field out of range.
  void validate() const;

  /// Canonical `key = value` text; equal configs give equal text.
  std::string canonical() const;
};

/// Parses the text format. Later keys override earlier ones.
ExperimentConfig parse_config(std::istream& is);
ExperimentConfig load_config(const std::filesystem::path& path);

/// Builds the damping pair named by a spec string on n nodes.
DampingPair make_damping(const std::string& spec, std::size_t n);

}  // namespace dampinv
