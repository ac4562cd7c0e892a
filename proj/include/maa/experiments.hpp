// SPDX-License-Identifier: Apache-2.0
// Copyright (c) 2026 maa contributors
//
// Experiment driver: named preset configurations, flat key=value config
// handling, and the five run scenarios (crossing-rate curve, upper-tail
// ccdf curve, supremum-CDF curve, five-system comparison, validation
// battery), each emitting a schema-stable CSV or report.

#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include <armadillo>

#include "maa/correlation.hpp"
#include "maa/numerics.hpp"
#include "maa/simulate.hpp"

namespace maa::experiments {

enum class scenario { lcr_curve, ccdf_curve, cdf_curve, comparison, validate };

scenario scenario_from_name(const std::string& name);
std::string scenario_name(scenario s);

// Threshold sweep: count values from min to max, linearly or
// logarithmically spaced.
struct threshold_spec {
  double min = 0.5;
  double max = 16.0;
  std::size_t count = 33;
  bool log_scale = true;
};

arma::vec make_thresholds(const threshold_spec& spec);

struct experiment_config {
  scenario kind = scenario::lcr_curve;
  correlation::array_geometry geometry{4, 0.25, 1.0};
  correlation::channel_params params{};  // unit beta, symbol energy, noise
  threshold_spec thresholds{};
  simulate::sim_config sim{};
  bool sim_enabled = true;
  numerics::quadrature_spec quadrature{};
  std::string output_path = "maa_out.csv";
  std::string trace_dump_path;
  std::string preset_name;  // recorded in output metadata when set
};

// Built-in configurations reproducing the reference figure set:
// fig2a/b/c (crossing-rate curves), fig3a/b/c (ccdf curves), fig4a-d
// (supremum-CDF curves over the span/spacing grid), fig5a-e (single-system
// CDF curves), fig5 (five-system comparison), validate.
experiment_config preset(const std::string& name);
std::vector<std::string> preset_names();

// Flat key=value config file ('#' comments, blank lines ignored); keys are
// the same ones apply_override accepts. Values in `base` not mentioned in
// the file are kept.
experiment_config load_config_file(const std::string& path, experiment_config base);

// Applies one key=value override. Unknown key or unparsable value throws
// std::invalid_argument.
void apply_override(experiment_config& cfg, const std::string& key, const std::string& value);

// Executes the configured scenario, writing the CSV/report to
// cfg.output_path and mirroring validation results to stdout.
// Returns the process exit code: 0 success, 2 numerical failure,
// 3 validation failure.
int run(const experiment_config& cfg);

}  // namespace maa::experiments
