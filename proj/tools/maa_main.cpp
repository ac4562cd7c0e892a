// SPDX-License-Identifier: Apache-2.0
// Copyright (c) 2026 maa contributors

#include <cstdint>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "maa/experiments.hpp"
#include "maa/version.hpp"

int main(int argc, char** argv) {
  CLI::App app{"analytic bounds and Monte Carlo for movable-antenna-array SNR"};
  app.set_version_flag("--version", std::string(maa::version_string));

  std::string scenario_arg;
  std::string preset_name;
  std::string config_path;
  std::vector<std::string> overrides;
  std::string out_path;
  std::string dump_path;
  std::uint64_t seed = 0;
  unsigned threads = 0;
  bool no_sim = false;
  bool seed_given = false;

  app.add_option("scenario", scenario_arg,
                 "one of: lcr_curve, ccdf_curve, cdf_curve, comparison, validate "
                 "(optional when --preset or --config provides it)");
  app.add_option("--preset", preset_name, "start from a named preset (see --list-presets)");
  app.add_option("--config", config_path, "read key=value lines from a file");
  app.add_option("--set", overrides, "override a single key, e.g. --set m=6")
      ->take_all();
  app.add_option("--out", out_path, "output file path");
  app.add_option("--seed", seed, "simulator seed")->each([&](const std::string&) {
    seed_given = true;
  });
  app.add_option("--threads", threads, "worker threads for the simulator (0 = env/serial)");
  app.add_flag("--no-sim", no_sim, "skip the Monte Carlo simulator, write analytic columns only");
  app.add_option("--dump-traces", dump_path, "write raw SNR traces to this CSV path");
  bool list_presets = false;
  app.add_flag("--list-presets", list_presets, "list preset names and exit");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 1;
  }

  if (list_presets) {
    for (const auto& name : maa::experiments::preset_names()) std::cout << name << '\n';
    return 0;
  }

  maa::experiments::experiment_config cfg;
  try {
    if (!preset_name.empty()) cfg = maa::experiments::preset(preset_name);
    if (!config_path.empty()) cfg = maa::experiments::load_config_file(config_path, cfg);
    if (!scenario_arg.empty()) cfg.kind = maa::experiments::scenario_from_name(scenario_arg);
    if (scenario_arg.empty() && preset_name.empty() && config_path.empty()) {
      std::cerr << "error: need a scenario, --preset, or --config\n";
      return 1;
    }
    for (const auto& kv : overrides) {
      const auto eq = kv.find('=');
      if (eq == std::string::npos) {
        std::cerr << "error: --set expects key=value, got: " << kv << '\n';
        return 1;
      }
      maa::experiments::apply_override(cfg, kv.substr(0, eq), kv.substr(eq + 1));
    }
    if (seed_given) cfg.sim.seed = seed;
    if (threads != 0) cfg.sim.threads = threads;
    if (no_sim) cfg.sim_enabled = false;
    if (!out_path.empty()) cfg.output_path = out_path;
    if (!dump_path.empty()) cfg.trace_dump_path = dump_path;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }

  return maa::experiments::run(cfg);
}
