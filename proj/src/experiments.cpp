// SPDX-License-Identifier: Apache-2.0
// Copyright (c) 2026 maa contributors

#include "maa/experiments.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "maa/analytic.hpp"
#include "maa/errors.hpp"
#include "maa/version.hpp"

namespace maa::experiments {

namespace {

constexpr double kPiSquared = 9.869604401089358618834490999876;
// First positive root of J0 divided by 2 pi: adjacent-element spacing with
// exactly zero correlation.
constexpr double kUncorrelatedSpacing = 0.3827398747810062;

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.15g", v);
  return buf;
}

std::string fmt6(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

}  // namespace

scenario scenario_from_name(const std::string& name) {
  if (name == "lcr_curve") return scenario::lcr_curve;
  if (name == "ccdf_curve") return scenario::ccdf_curve;
  if (name == "cdf_curve") return scenario::cdf_curve;
  if (name == "comparison") return scenario::comparison;
  if (name == "validate") return scenario::validate;
  throw std::invalid_argument("unknown scenario: " + name);
}

std::string scenario_name(scenario s) {
  switch (s) {
    case scenario::lcr_curve: return "lcr_curve";
    case scenario::ccdf_curve: return "ccdf_curve";
    case scenario::cdf_curve: return "cdf_curve";
    case scenario::comparison: return "comparison";
    case scenario::validate: return "validate";
  }
  throw std::logic_error("scenario_name: bad enum");
}

arma::vec make_thresholds(const threshold_spec& spec) {
  if (spec.count == 0) throw std::invalid_argument("thresholds: count must be >= 1");
  if (!std::isfinite(spec.min) || !std::isfinite(spec.max)) {
    throw std::domain_error("thresholds: bounds must be finite");
  }
  if (spec.count == 1) return arma::vec{spec.min};
  if (!(spec.max > spec.min)) throw std::invalid_argument("thresholds: max must exceed min");
  if (spec.log_scale) {
    if (!(spec.min > 0.0)) throw std::invalid_argument("thresholds: log scale needs min > 0");
    return arma::exp(arma::linspace(std::log(spec.min), std::log(spec.max), spec.count));
  }
  return arma::linspace(spec.min, spec.max, spec.count);
}

// ---------------------------------------------------------------------------
// Presets
// ---------------------------------------------------------------------------

namespace {

experiment_config base_config() {
  experiment_config cfg;
  cfg.params = correlation::channel_params{1.0, 1.0, 1.0};
  cfg.sim.realizations = 10000;
  cfg.sim.grid_points = 2048;
  cfg.sim.seed = 1;
  return cfg;
}

}  // namespace

std::vector<std::string> preset_names() {
  return {"fig2a", "fig2b", "fig2c", "fig3a", "fig3b", "fig3c", "fig4a", "fig4b",
          "fig4c", "fig4d", "fig5a", "fig5b", "fig5c", "fig5d", "fig5e", "fig5",
          "validate"};
}

experiment_config preset(const std::string& name) {
  experiment_config cfg = base_config();
  cfg.preset_name = name;
  cfg.output_path = name + ".csv";

  const auto lcr_thresholds = threshold_spec{0.5, 16.0, 33, true};
  const auto ccdf_thresholds = threshold_spec{2.0, 24.0, 25, true};
  const auto cdf_thresholds = threshold_spec{0.5, 30.0, 33, true};

  if (name == "fig2a") {
    cfg.kind = scenario::lcr_curve;
    cfg.geometry = {4, 0.25, 1.0};
    cfg.thresholds = lcr_thresholds;
  } else if (name == "fig2b") {
    cfg.kind = scenario::lcr_curve;
    cfg.geometry = {6, 0.25, 1.0};
    cfg.thresholds = lcr_thresholds;
  } else if (name == "fig2c") {
    cfg.kind = scenario::lcr_curve;
    cfg.geometry = {4, 0.5, 1.0};
    cfg.thresholds = lcr_thresholds;
  } else if (name == "fig3a") {
    cfg.kind = scenario::ccdf_curve;
    cfg.geometry = {4, 0.25, 1.0};
    cfg.thresholds = ccdf_thresholds;
  } else if (name == "fig3b") {
    cfg.kind = scenario::ccdf_curve;
    cfg.geometry = {6, 0.25, 1.0};
    cfg.thresholds = ccdf_thresholds;
  } else if (name == "fig3c") {
    cfg.kind = scenario::ccdf_curve;
    cfg.geometry = {4, 0.5, 1.0};
    cfg.thresholds = ccdf_thresholds;
  } else if (name == "fig4a") {
    cfg.kind = scenario::cdf_curve;
    cfg.geometry = {4, 0.1, 1.0};
    cfg.thresholds = cdf_thresholds;
  } else if (name == "fig4b") {
    cfg.kind = scenario::cdf_curve;
    cfg.geometry = {4, 0.5, 1.0};
    cfg.thresholds = cdf_thresholds;
  } else if (name == "fig4c") {
    cfg.kind = scenario::cdf_curve;
    cfg.geometry = {4, 0.1, 0.1};
    cfg.thresholds = cdf_thresholds;
  } else if (name == "fig4d") {
    cfg.kind = scenario::cdf_curve;
    cfg.geometry = {4, 0.5, 0.1};
    cfg.thresholds = cdf_thresholds;
  } else if (name == "fig5a") {
    cfg.kind = scenario::cdf_curve;
    cfg.geometry = {1, 0.5, 0.0};
    cfg.thresholds = cdf_thresholds;
    cfg.sim.grid_points = 1;
  } else if (name == "fig5b") {
    cfg.kind = scenario::cdf_curve;
    cfg.geometry = {1, 0.5, 1.0};
    cfg.thresholds = cdf_thresholds;
  } else if (name == "fig5c") {
    cfg.kind = scenario::cdf_curve;
    cfg.geometry = {4, 0.5, 0.0};
    cfg.thresholds = cdf_thresholds;
    cfg.sim.grid_points = 1;
  } else if (name == "fig5d") {
    cfg.kind = scenario::cdf_curve;
    cfg.geometry = {4, 0.5, 1.0};
    cfg.thresholds = cdf_thresholds;
  } else if (name == "fig5e") {
    cfg.kind = scenario::cdf_curve;
    cfg.geometry = {4, 0.1, 1.0};
    cfg.thresholds = cdf_thresholds;
  } else if (name == "fig5") {
    cfg.kind = scenario::comparison;
    cfg.geometry = {4, 0.5, 1.0};  // recorded but the systems are fixed
    cfg.thresholds = cdf_thresholds;
  } else if (name == "validate") {
    cfg.kind = scenario::validate;
    cfg.geometry = {2, 0.25, 0.5};
    cfg.thresholds = {0.5, 8.0, 17, true};
    cfg.sim.realizations = 2000;
    cfg.sim.grid_points = 1024;
    cfg.output_path = "validate_report.txt";
  } else {
    throw std::invalid_argument("unknown preset: " + name);
  }
  return cfg;
}

// ---------------------------------------------------------------------------
// Config file / overrides
// ---------------------------------------------------------------------------

namespace {

double parse_double(const std::string& key, const std::string& value) {
  std::size_t pos = 0;
  double v = 0.0;
  try {
    v = std::stod(value, &pos);
  } catch (const std::exception&) {
    throw std::invalid_argument("bad numeric value for " + key + ": " + value);
  }
  if (pos != value.size()) {
    throw std::invalid_argument("bad numeric value for " + key + ": " + value);
  }
  return v;
}

std::uint64_t parse_u64(const std::string& key, const std::string& value) {
  std::size_t pos = 0;
  unsigned long long v = 0;
  // stoull silently wraps negative input, so reject a sign up front
  if (value.find('-') != std::string::npos) {
    throw std::invalid_argument("bad integer value for " + key + ": " + value);
  }
  try {
    v = std::stoull(value, &pos);
  } catch (const std::exception&) {
    throw std::invalid_argument("bad integer value for " + key + ": " + value);
  }
  if (pos != value.size()) {
    throw std::invalid_argument("bad integer value for " + key + ": " + value);
  }
  return v;
}

bool parse_bool(const std::string& key, const std::string& value) {
  if (value == "1" || value == "true" || value == "yes" || value == "on") return true;
  if (value == "0" || value == "false" || value == "no" || value == "off") return false;
  throw std::invalid_argument("bad boolean value for " + key + ": " + value);
}

std::string trim(const std::string& s) {
  const auto a = s.find_first_not_of(" \t\r\n");
  if (a == std::string::npos) return {};
  const auto b = s.find_last_not_of(" \t\r\n");
  return s.substr(a, b - a + 1);
}

}  // namespace

void apply_override(experiment_config& cfg, const std::string& key, const std::string& value) {
  if (key == "scenario") {
    cfg.kind = scenario_from_name(value);
  } else if (key == "m") {
    const std::uint64_t m = parse_u64(key, value);
    if (m == 0 || m > 64) throw std::invalid_argument("m out of range [1, 64]");
    cfg.geometry.m = static_cast<unsigned>(m);
  } else if (key == "delta") {
    cfg.geometry.delta = parse_double(key, value);
  } else if (key == "span") {
    cfg.geometry.span = parse_double(key, value);
  } else if (key == "beta") {
    cfg.params.beta = parse_double(key, value);
  } else if (key == "symbol_energy") {
    cfg.params.symbol_energy = parse_double(key, value);
  } else if (key == "noise_var") {
    cfg.params.noise_var = parse_double(key, value);
  } else if (key == "thresholds.min") {
    cfg.thresholds.min = parse_double(key, value);
  } else if (key == "thresholds.max") {
    cfg.thresholds.max = parse_double(key, value);
  } else if (key == "thresholds.count") {
    cfg.thresholds.count = parse_u64(key, value);
  } else if (key == "thresholds.scale") {
    if (value == "log") {
      cfg.thresholds.log_scale = true;
    } else if (value == "linear") {
      cfg.thresholds.log_scale = false;
    } else {
      throw std::invalid_argument("thresholds.scale must be linear or log");
    }
  } else if (key == "sim.enabled") {
    cfg.sim_enabled = parse_bool(key, value);
  } else if (key == "sim.realizations") {
    cfg.sim.realizations = parse_u64(key, value);
  } else if (key == "sim.grid_points") {
    cfg.sim.grid_points = parse_u64(key, value);
  } else if (key == "sim.seed") {
    cfg.sim.seed = parse_u64(key, value);
  } else if (key == "sim.threads") {
    cfg.sim.threads = static_cast<unsigned>(parse_u64(key, value));
  } else if (key == "quad.abs_tol") {
    cfg.quadrature.abs_tol = parse_double(key, value);
  } else if (key == "quad.rel_tol") {
    cfg.quadrature.rel_tol = parse_double(key, value);
  } else if (key == "quad.max_panels") {
    cfg.quadrature.max_panels = parse_u64(key, value);
  } else if (key == "quad.truncation_threshold") {
    cfg.quadrature.truncation_threshold = parse_double(key, value);
  } else if (key == "out") {
    cfg.output_path = value;
  } else if (key == "dump") {
    cfg.trace_dump_path = value;
  } else {
    throw std::invalid_argument("unknown config key: " + key);
  }
}

experiment_config load_config_file(const std::string& path, experiment_config base) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open config file: " + path);
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const std::string t = trim(line);
    if (t.empty() || t[0] == '#') continue;
    const auto eq = t.find('=');
    if (eq == std::string::npos) {
      throw std::invalid_argument(path + ":" + std::to_string(lineno) +
                                  ": expected key=value");
    }
    apply_override(base, trim(t.substr(0, eq)), trim(t.substr(eq + 1)));
  }
  return base;
}

// ---------------------------------------------------------------------------
// Output plumbing
// ---------------------------------------------------------------------------

namespace {

void write_metadata(std::ostream& out, const experiment_config& cfg, bool with_geometry) {
  out << "# maa version = " << maa::version_string << '\n';
  out << "# scenario = " << scenario_name(cfg.kind) << '\n';
  if (!cfg.preset_name.empty()) out << "# preset = " << cfg.preset_name << '\n';
  if (with_geometry) {
    out << "# m = " << cfg.geometry.m << '\n';
    out << "# delta = " << fmt(cfg.geometry.delta) << '\n';
    out << "# span = " << fmt(cfg.geometry.span) << '\n';
  }
  out << "# beta = " << fmt(cfg.params.beta) << '\n';
  out << "# symbol_energy = " << fmt(cfg.params.symbol_energy) << '\n';
  out << "# noise_var = " << fmt(cfg.params.noise_var) << '\n';
  out << "# thresholds.min = " << fmt(cfg.thresholds.min) << '\n';
  out << "# thresholds.max = " << fmt(cfg.thresholds.max) << '\n';
  out << "# thresholds.count = " << cfg.thresholds.count << '\n';
  out << "# thresholds.scale = " << (cfg.thresholds.log_scale ? "log" : "linear") << '\n';
  out << "# sim.enabled = " << (cfg.sim_enabled ? 1 : 0) << '\n';
  if (cfg.sim_enabled) {
    out << "# sim.realizations = " << cfg.sim.realizations << '\n';
    out << "# sim.grid_points = " << cfg.sim.grid_points << '\n';
    out << "# sim.seed = " << cfg.sim.seed << '\n';
  }
  out << "# quad.abs_tol = " << fmt(cfg.quadrature.abs_tol) << '\n';
  out << "# quad.rel_tol = " << fmt(cfg.quadrature.rel_tol) << '\n';
  out << "# quad.max_panels = " << cfg.quadrature.max_panels << '\n';
  out << "# quad.truncation_threshold = " << fmt(cfg.quadrature.truncation_threshold) << '\n';
}

std::ofstream open_output(const std::string& path) {
  std::ofstream out(path, std::ios::binary);  // binary: LF on every platform
  if (!out) throw std::runtime_error("cannot open output file: " + path);
  return out;
}

struct sup_cdf_columns {
  arma::vec cdf, ci_low, ci_high;
};

sup_cdf_columns sup_cdf_for(const simulate::empirical_stats& stats) {
  const std::size_t k = stats.thresholds.n_elem;
  sup_cdf_columns c;
  c.cdf.set_size(k);
  c.ci_low.set_size(k);
  c.ci_high.set_size(k);
  for (std::size_t j = 0; j < k; ++j) {
    const simulate::proportion p = simulate::empirical_sup_cdf(stats, j);
    c.cdf(j) = p.fraction;
    c.ci_low(j) = p.ci_low;
    c.ci_high(j) = p.ci_high;
  }
  return c;
}

// ---------------------------------------------------------------------------
// Scenarios
// ---------------------------------------------------------------------------

int run_lcr_curve(const experiment_config& cfg) {
  const arma::vec th = make_thresholds(cfg.thresholds);
  const analytic::lcr_context ctx = analytic::build_lcr_context(cfg.geometry, cfg.params);

  arma::vec lcr_analytic(th.n_elem);
  for (arma::uword j = 0; j < th.n_elem; ++j) {
    lcr_analytic(j) = analytic::lcr_correlated(th(j), ctx, cfg.quadrature);
  }

  simulate::empirical_stats stats;
  if (cfg.sim_enabled) {
    stats = simulate::simulate_process(cfg.geometry, cfg.params, cfg.sim, th,
                                       cfg.trace_dump_path);
  }

  std::ofstream out = open_output(cfg.output_path);
  write_metadata(out, cfg, true);
  if (cfg.sim_enabled) {
    out << "s_th,lcr_analytic,lcr_empirical,lcr_std_err\n";
    for (arma::uword j = 0; j < th.n_elem; ++j) {
      const simulate::rate_estimate e = simulate::empirical_lcr(stats, j);
      out << fmt(th(j)) << ',' << fmt(lcr_analytic(j)) << ',' << fmt(e.rate) << ','
          << fmt(e.std_err) << '\n';
    }
  } else {
    out << "s_th,lcr_analytic\n";
    for (arma::uword j = 0; j < th.n_elem; ++j) {
      out << fmt(th(j)) << ',' << fmt(lcr_analytic(j)) << '\n';
    }
  }
  std::cout << "wrote " << cfg.output_path << " (" << th.n_elem << " rows)\n";
  return 0;
}

int run_ccdf_curve(const experiment_config& cfg) {
  const arma::vec th = make_thresholds(cfg.thresholds);

  arma::vec ccdf_bound(th.n_elem);
  for (arma::uword j = 0; j < th.n_elem; ++j) {
    const analytic::bound_result b =
        analytic::cdf_lower_bound_correlated(th(j), cfg.geometry, cfg.params, cfg.quadrature);
    ccdf_bound(j) = 1.0 - b.lower_bound_raw;
  }

  std::ofstream out = open_output(cfg.output_path);
  write_metadata(out, cfg, true);
  if (cfg.sim_enabled) {
    const simulate::empirical_stats stats = simulate::simulate_process(
        cfg.geometry, cfg.params, cfg.sim, th, cfg.trace_dump_path);
    const sup_cdf_columns c = sup_cdf_for(stats);
    out << "s_th,ccdf_bound_analytic,ccdf_empirical,ci_low,ci_high\n";
    for (arma::uword j = 0; j < th.n_elem; ++j) {
      // complement flips the interval endpoints
      out << fmt(th(j)) << ',' << fmt(ccdf_bound(j)) << ',' << fmt(1.0 - c.cdf(j)) << ','
          << fmt(1.0 - c.ci_high(j)) << ',' << fmt(1.0 - c.ci_low(j)) << '\n';
    }
  } else {
    out << "s_th,ccdf_bound_analytic\n";
    for (arma::uword j = 0; j < th.n_elem; ++j) {
      out << fmt(th(j)) << ',' << fmt(ccdf_bound(j)) << '\n';
    }
  }
  std::cout << "wrote " << cfg.output_path << " (" << th.n_elem << " rows)\n";
  return 0;
}

int run_cdf_curve(const experiment_config& cfg) {
  const arma::vec th = make_thresholds(cfg.thresholds);

  arma::vec raw(th.n_elem), clamped(th.n_elem);
  for (arma::uword j = 0; j < th.n_elem; ++j) {
    const analytic::bound_result b =
        analytic::cdf_lower_bound_correlated(th(j), cfg.geometry, cfg.params, cfg.quadrature);
    raw(j) = b.lower_bound_raw;
    clamped(j) = b.lower_bound_clamped;
  }

  std::ofstream out = open_output(cfg.output_path);
  write_metadata(out, cfg, true);
  if (cfg.sim_enabled) {
    const simulate::empirical_stats stats = simulate::simulate_process(
        cfg.geometry, cfg.params, cfg.sim, th, cfg.trace_dump_path);
    const sup_cdf_columns c = sup_cdf_for(stats);
    out << "s_th,cdf_bound_raw,cdf_bound_clamped,cdf_empirical,ci_low,ci_high\n";
    for (arma::uword j = 0; j < th.n_elem; ++j) {
      out << fmt(th(j)) << ',' << fmt(raw(j)) << ',' << fmt(clamped(j)) << ','
          << fmt(c.cdf(j)) << ',' << fmt(c.ci_low(j)) << ',' << fmt(c.ci_high(j)) << '\n';
    }
  } else {
    out << "s_th,cdf_bound_raw,cdf_bound_clamped\n";
    for (arma::uword j = 0; j < th.n_elem; ++j) {
      out << fmt(th(j)) << ',' << fmt(raw(j)) << ',' << fmt(clamped(j)) << '\n';
    }
  }
  std::cout << "wrote " << cfg.output_path << " (" << th.n_elem << " rows)\n";
  return 0;
}

struct comparison_system {
  const char* name;
  correlation::array_geometry geometry;
};

int run_comparison(const experiment_config& cfg) {
  const arma::vec th = make_thresholds(cfg.thresholds);
  const std::vector<comparison_system> systems = {
      {"sa", {1, 0.5, 0.0}},        // single static antenna
      {"sfa", {1, 0.5, 1.0}},       // single antenna sweeping the span
      {"fa4", {4, 0.5, 0.0}},       // static four-element array
      {"maa4_d05", {4, 0.5, 1.0}},  // movable array, half-wavelength spacing
      {"maa4_d01", {4, 0.1, 1.0}},  // movable array, tight spacing
  };

  std::vector<arma::vec> bound_raw, bound_clamped;
  std::vector<sup_cdf_columns> emp;
  for (const auto& sys : systems) {
    arma::vec raw(th.n_elem), clamped(th.n_elem);
    for (arma::uword j = 0; j < th.n_elem; ++j) {
      const analytic::bound_result b =
          analytic::cdf_lower_bound_correlated(th(j), sys.geometry, cfg.params, cfg.quadrature);
      raw(j) = b.lower_bound_raw;
      clamped(j) = b.lower_bound_clamped;
    }
    bound_raw.push_back(std::move(raw));
    bound_clamped.push_back(std::move(clamped));
    if (cfg.sim_enabled) {
      simulate::sim_config sim = cfg.sim;
      if (sys.geometry.span == 0.0) sim.grid_points = 1;
      const simulate::empirical_stats stats =
          simulate::simulate_process(sys.geometry, cfg.params, sim, th);
      emp.push_back(sup_cdf_for(stats));
    }
  }

  std::ofstream out = open_output(cfg.output_path);
  write_metadata(out, cfg, false);
  for (const auto& sys : systems) {
    out << "# system " << sys.name << ": m = " << sys.geometry.m
        << ", delta = " << fmt(sys.geometry.delta) << ", span = " << fmt(sys.geometry.span)
        << '\n';
  }
  out << "s_th";
  for (const auto& sys : systems) {
    out << ',' << sys.name << "_bound_raw," << sys.name << "_bound_clamped";
    if (cfg.sim_enabled) {
      out << ',' << sys.name << "_cdf_empirical," << sys.name << "_ci_low," << sys.name
          << "_ci_high";
    }
  }
  out << '\n';
  for (arma::uword j = 0; j < th.n_elem; ++j) {
    out << fmt(th(j));
    for (std::size_t s = 0; s < systems.size(); ++s) {
      out << ',' << fmt(bound_raw[s](j)) << ',' << fmt(bound_clamped[s](j));
      if (cfg.sim_enabled) {
        out << ',' << fmt(emp[s].cdf(j)) << ',' << fmt(emp[s].ci_low(j)) << ','
            << fmt(emp[s].ci_high(j));
      }
    }
    out << '\n';
  }
  std::cout << "wrote " << cfg.output_path << " (" << th.n_elem << " rows, "
            << systems.size() << " systems)\n";
  return 0;
}

// ---------------------------------------------------------------------------
// Validation battery
// ---------------------------------------------------------------------------

struct check_line {
  std::string name;
  enum class status { pass, fail, flagged } st;
  std::string detail;
};

int run_validate(const experiment_config& cfg) {
  if (!cfg.sim_enabled) {
    throw std::invalid_argument("validate requires the simulator (drop --no-sim)");
  }
  std::vector<check_line> checks;
  const double gbar = cfg.params.mean_branch_snr();

  // -- Small-displacement covariance expansion ------------------------------
  {
    const arma::mat sigma = correlation::build_sigma(cfg.geometry);
    const arma::mat b = correlation::build_b_matrix(cfg.geometry);
    const double taus[3] = {1e-2, 1e-3, 1e-4};
    double ratios[3];
    for (int i = 0; i < 3; ++i) {
      const arma::mat remainder =
          correlation::cross_covariance(cfg.geometry, taus[i]) - (sigma - b * taus[i] * taus[i]);
      ratios[i] = arma::abs(remainder).max() / (taus[i] * taus[i]);
    }
    const bool ok = ratios[0] > ratios[1] && ratios[1] > ratios[2];
    checks.push_back({"sigma_tau_expansion",
                      ok ? check_line::status::pass : check_line::status::fail,
                      "remainder/tau^2 at tau=1e-2,1e-3,1e-4: " + fmt6(ratios[0]) + ", " +
                          fmt6(ratios[1]) + ", " + fmt6(ratios[2])});
  }

  const analytic::lcr_context ctx = analytic::build_lcr_context(cfg.geometry, cfg.params);

  // -- Derivative-variance trace identity -----------------------------------
  {
    const double expected =
        4.0 * gbar * gbar * cfg.params.beta * arma::trace(ctx.b * ctx.sigma);
    const simulate::mc_estimate mc =
        simulate::mc_sdot_variance(ctx, 100000, cfg.sim.seed + 101);
    const bool ok = std::abs(mc.value - expected) <= 3.0 * mc.std_err;
    checks.push_back({"sdot_variance_trace",
                      ok ? check_line::status::pass : check_line::status::fail,
                      "mc = " + fmt6(mc.value) + " +- " + fmt6(mc.std_err) +
                          ", trace formula = " + fmt6(expected)});
  }

  // -- Joint characteristic function ----------------------------------------
  {
    const double probes[3][2] = {{0.3, -0.5}, {1.0, 1.0}, {-1.0, 0.3}};
    bool ok = true;
    std::string detail;
    for (int i = 0; i < 3; ++i) {
      const std::complex<double> phi = analytic::joint_cf(ctx, probes[i][0], probes[i][1]);
      const simulate::mc_cf_estimate mc = simulate::mc_joint_cf(
          ctx, probes[i][0], probes[i][1], 200000, cfg.sim.seed + 202 + i);
      const double err = std::abs(phi - mc.value);
      if (err > 3.0 * mc.std_err + 1e-12) ok = false;
      if (i) detail += "; ";
      detail += "(" + fmt6(probes[i][0]) + "," + fmt6(probes[i][1]) + "): |diff| = " +
                fmt6(err) + " vs 3se = " + fmt6(3.0 * mc.std_err);
    }
    checks.push_back(
        {"joint_cf_probes", ok ? check_line::status::pass : check_line::status::fail, detail});
  }

  // -- Static CDF against direct hypoexponential sampling -------------------
  {
    const analytic::sigma_eigen eig =
        analytic::decompose_sigma(correlation::build_sigma(cfg.geometry));
    const std::size_t n = 200000;
    simulate::philox_stream rng(cfg.sim.seed + 303, 0);
    arma::vec samples(n);
    for (std::size_t i = 0; i < n; ++i) {
      double s = 0.0;
      for (unsigned k = 0; k < eig.rank; ++k) {
        s += eig.lambda(k) * -std::log(1.0 - rng.next_uniform());
      }
      samples(i) = gbar * s;
    }
    samples = arma::sort(samples);
    double ks = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double f = analytic::cdf_snr_fixed_correlated(samples(i), eig, cfg.params);
      const double lo = static_cast<double>(i) / n;
      const double hi = static_cast<double>(i + 1) / n;
      ks = std::max(ks, std::max(std::abs(f - lo), std::abs(f - hi)));
    }
    const double limit = 1.63 / std::sqrt(static_cast<double>(n)) + 1e-4;
    const bool ok = ks < limit;
    checks.push_back({"static_cdf_ks", ok ? check_line::status::pass : check_line::status::fail,
                      "ks = " + fmt6(ks) + ", limit = " + fmt6(limit)});
  }

  // -- Crossing rate and bound containment on the configured geometry -------
  {
    const arma::vec th = make_thresholds(cfg.thresholds);
    const simulate::empirical_stats stats =
        simulate::simulate_process(cfg.geometry, cfg.params, cfg.sim, th);

    bool lcr_ok = true;
    std::string lcr_detail;
    const arma::uword probe_idx[4] = {0, th.n_elem / 3, (2 * th.n_elem) / 3, th.n_elem - 1};
    for (int i = 0; i < 4; ++i) {
      const arma::uword j = probe_idx[i];
      const double ana = analytic::lcr_correlated(th(j), ctx, cfg.quadrature);
      const simulate::rate_estimate e = simulate::empirical_lcr(stats, j);
      const double tol = std::max(0.10 * ana, 3.0 * e.std_err);
      if (std::abs(ana - e.rate) > tol) lcr_ok = false;
      if (i) lcr_detail += "; ";
      lcr_detail += "s=" + fmt6(th(j)) + ": analytic " + fmt6(ana) + ", empirical " +
                    fmt6(e.rate) + " +- " + fmt6(e.std_err);
    }
    checks.push_back({"lcr_analytic_vs_empirical",
                      lcr_ok ? check_line::status::pass : check_line::status::fail, lcr_detail});

    bool contain_ok = true;
    double worst = 0.0;
    for (arma::uword j = 0; j < th.n_elem; ++j) {
      const analytic::bound_result b =
          analytic::cdf_lower_bound_correlated(th(j), cfg.geometry, cfg.params, cfg.quadrature);
      const simulate::proportion p = simulate::empirical_sup_cdf(stats, j);
      // the bound's ccdf must sit above the empirical ccdf's lower CI edge
      const double margin = (1.0 - b.lower_bound_raw) - (1.0 - p.ci_high);
      if (margin < -1e-12) contain_ok = false;
      worst = std::min(worst, margin);
    }
    checks.push_back({"bound_containment",
                      contain_ok ? check_line::status::pass : check_line::status::fail,
                      "worst ccdf margin over " + std::to_string(th.n_elem) +
                          " thresholds = " + fmt6(worst)});
  }

  // -- Printed independent-branch crossing-rate expression vs. oracle -------
  {
    // The printed closed form is kept verbatim even though its m = 1
    // reduction disagrees with both the inversion integral and simulation;
    // this check documents the measured ratio instead of correcting it.
    std::string detail;
    bool all_outside = true;

    const double span = cfg.geometry.span > 0.0 ? cfg.geometry.span : 0.5;
    {
      correlation::array_geometry geo{1, 0.5, span};
      simulate::sim_config sim = cfg.sim;
      const arma::vec th{gbar};
      const simulate::empirical_stats stats =
          simulate::simulate_process(geo, cfg.params, sim, th);
      const simulate::rate_estimate e = simulate::empirical_lcr(stats, 0);
      const double printed = analytic::lcr_uncorrelated(gbar, 1, cfg.params, kPiSquared);
      const double ratio = printed / e.rate;
      if (ratio >= 0.9 && ratio <= 1.1) all_outside = false;
      detail += "m=1 s=" + fmt6(gbar) + ": printed " + fmt6(printed) + ", mc " + fmt6(e.rate) +
                ", ratio " + fmt6(ratio);
    }
    {
      correlation::array_geometry geo{4, kUncorrelatedSpacing, span};
      simulate::sim_config sim = cfg.sim;
      const arma::vec th{gbar, 4.0 * gbar};
      const simulate::empirical_stats stats =
          simulate::simulate_process(geo, cfg.params, sim, th);
      for (arma::uword j = 0; j < th.n_elem; ++j) {
        const simulate::rate_estimate e = simulate::empirical_lcr(stats, j);
        const double printed = analytic::lcr_uncorrelated(th(j), 4, cfg.params, kPiSquared);
        const double ratio = printed / e.rate;
        if (ratio >= 0.9 && ratio <= 1.1) all_outside = false;
        detail += "; m=4 s=" + fmt6(th(j)) + ": printed " + fmt6(printed) + ", mc " +
                  fmt6(e.rate) + ", ratio " + fmt6(ratio);
      }
    }
    // A ratio inside [0.9, 1.1] would contradict the documented discrepancy.
    checks.push_back({"printed_unc_lcr_vs_oracle",
                      all_outside ? check_line::status::flagged : check_line::status::fail,
                      detail + " (documented discrepancy; ratios expected outside [0.9,1.1])"});
  }

  // -- Report ----------------------------------------------------------------
  std::ostringstream report;
  write_metadata(report, cfg, true);
  std::size_t fails = 0, flags = 0;
  for (const auto& c : checks) {
    const char* st = c.st == check_line::status::pass    ? "PASS"
                     : c.st == check_line::status::fail ? "FAIL"
                                                        : "FLAGGED";
    if (c.st == check_line::status::fail) ++fails;
    if (c.st == check_line::status::flagged) ++flags;
    report << "CHECK " << c.name << ": " << st << " -- " << c.detail << '\n';
  }
  report << "RESULT: " << (fails == 0 ? "PASS" : "FAIL") << " (" << (checks.size() - fails - flags)
         << " passed, " << fails << " failed, " << flags << " flagged)\n";

  const std::string text = report.str();
  std::ofstream out = open_output(cfg.output_path);
  out << text;
  std::cout << text;
  return fails == 0 ? 0 : 3;
}

}  // namespace

int run(const experiment_config& cfg) {
  try {
    switch (cfg.kind) {
      case scenario::lcr_curve: return run_lcr_curve(cfg);
      case scenario::ccdf_curve: return run_ccdf_curve(cfg);
      case scenario::cdf_curve: return run_cdf_curve(cfg);
      case scenario::comparison: return run_comparison(cfg);
      case scenario::validate: return run_validate(cfg);
    }
    return 1;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  } catch (const std::domain_error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "numerical failure: " << e.what() << '\n';
    return 2;
  }
}

}  // namespace maa::experiments
