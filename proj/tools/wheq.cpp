// Experiment runner for the frequency-space well-posedness checks.
//   wheq run <config>                 execute a config file
//   wheq scenario <name> [--override key=value ...]
//   wheq selftest                     module property suites
// WHEQ_WORKERS selects the sweep worker count (default: hardware parallelism).

#include "wheq/config.hpp"
#include "wheq/runner.hpp"
#include "wheq/scenario.hpp"
#include "wheq/selftest.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <string>
#include <vector>

namespace {

void apply_overrides(wheq::RunConfig& cfg, const std::vector<std::string>& overrides) {
  for (const auto& ov : overrides) {
    std::size_t eq = ov.find('=');
    if (eq == std::string::npos)
      throw wheq::ConfigError("override must be key=value: " + ov);
    cfg.set(ov.substr(0, eq), ov.substr(eq + 1));
  }
}

int execute(const wheq::RunConfig& cfg) {
  wheq::RunResult res = wheq::run(cfg);
  if (res.failures.empty()) {
    std::printf("ok: report at %s\n", res.report_path.c_str());
  } else {
    std::printf("FAILED (%zu issue%s), report at %s\n", res.failures.size(),
                res.failures.size() == 1 ? "" : "s", res.report_path.c_str());
    for (const auto& f : res.failures) std::printf("  - %s\n", f.c_str());
  }
  return res.exit_code;
}

} // namespace

int main(int argc, char** argv) {
  CLI::App app{"frequency-space simulator and estimate verifier for weakly "
               "hyperbolic Cauchy problems"};
  app.require_subcommand(1);

  std::string config_path;
  auto* run_cmd = app.add_subcommand("run", "execute a run config file");
  run_cmd->add_option("config", config_path, "path to the config")->required();

  std::string scenario_name;
  std::vector<std::string> overrides;
  auto* scen_cmd = app.add_subcommand("scenario", "run a built-in scenario");
  scen_cmd->add_option("name", scenario_name, "example1 | example2 | case3")->required();
  scen_cmd->add_option("--override", overrides, "key=value config override")
      ->take_all()
      ->allow_extra_args(false);

  auto* self_cmd = app.add_subcommand("selftest", "run all module property suites");

  CLI11_PARSE(app, argc, argv);

  try {
    if (run_cmd->parsed()) {
      return execute(wheq::RunConfig::load_file(config_path));
    }
    if (scen_cmd->parsed()) {
      wheq::RunConfig cfg = wheq::scenario_config(scenario_name);
      apply_overrides(cfg, overrides);
      return execute(cfg);
    }
    if (self_cmd->parsed()) {
      auto results = wheq::run_selftests();
      bool all = true;
      for (const auto& r : results) {
        std::printf("[%s] %s: %s\n", r.pass ? "PASS" : "FAIL", r.name.c_str(),
                    r.detail.c_str());
        all = all && r.pass;
      }
      return all ? 0 : 1;
    }
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  }
  return 0;
}
