#include <cstdint>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"

#include "dampinv/config.hpp"
#include "dampinv/harness.hpp"

namespace {

struct CommonFlags {
  std::string config;
  std::string out;
  std::optional<std::uint64_t> seed;
};

void add_common(CLI::App* sub, CommonFlags& f) {
  sub->add_option("--config", f.config, "experiment configuration file")->check(CLI::ExistingFile);
  sub->add_option("--out", f.out, "output directory (overrides 'out')");
  sub->add_option("--seed", f.seed, "seed for generated test vectors (overrides 'seed')");
}

dampinv::ExperimentConfig resolve(const CommonFlags& f) {
  dampinv::ExperimentConfig cfg;
  if (!f.config.empty()) cfg = dampinv::load_config(f.config);
  if (!f.out.empty()) cfg.out = f.out;
  if (f.seed) cfg.seed = *f.seed;
  return cfg;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Boundary damping identification for the damped wave equation on the unit square"};
  app.set_version_flag("--version", std::string(dampinv::kToolVersion));
  app.require_subcommand(1);

  CommonFlags fwd, rec, swp, ver;
  std::string filter;
  auto* forward = app.add_subcommand("forward", "simulate one modal initial datum");
  auto* reconstruct = app.add_subcommand("reconstruct", "recover the damping pair from a modal probe");
  auto* sweep = app.add_subcommand("sweep", "logarithmic stability sweep over a scaled family");
  auto* verify = app.add_subcommand("verify", "run the invariant checks");
  add_common(forward, fwd);
  add_common(reconstruct, rec);
  add_common(sweep, swp);
  add_common(verify, ver);
  verify->add_option("--filter", filter, "only run checks whose name starts with this prefix");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : dampinv::kExitConfig;
  }

  return dampinv::guarded(
      [&]() -> int {
        if (*forward) return dampinv::cmd_forward(resolve(fwd), std::cout);
        if (*reconstruct) return dampinv::cmd_reconstruct(resolve(rec), std::cout);
        if (*sweep) return dampinv::cmd_sweep(resolve(swp), std::cout);
        return dampinv::cmd_verify(resolve(ver), filter, std::cout);
      },
      std::cerr);
}
