// SPDX-License-Identifier: Apache-2.0
// Copyright (c) 2026 maa contributors
//
// Acceptance battery: one check per shipped guarantee, each printing a
// single PASS/FAIL line with its measured numbers and wall time. Run with
// no arguments for the full battery, or name checks (ac1 .. ac10) to run a
// subset. Exit status is the number of failures.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <complex>
#include <cstdio>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "maa/analytic.hpp"
#include "maa/correlation.hpp"
#include "maa/experiments.hpp"
#include "maa/simulate.hpp"

using namespace maa;

namespace {

constexpr double kPi = 3.14159265358979323846264338327950288;
// adjacent-element spacing with exactly zero correlation (first J0 root / 2 pi)
constexpr double kUncorrelatedSpacing = 0.3827398747810062;

struct outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.4g", v);
  return buf;
}

numerics::quadrature_spec wide_quad() {
  numerics::quadrature_spec q;
  q.max_panels = 120000;
  return q;
}

struct ccdf_interval {
  double value = 0.0, lo = 0.0, hi = 0.0;
};

ccdf_interval empirical_ccdf(const simulate::empirical_stats& st, std::size_t j) {
  const simulate::proportion p = simulate::empirical_sup_cdf(st, j);
  return {1.0 - p.fraction, 1.0 - p.ci_high, 1.0 - p.ci_low};
}

// index of the grid threshold whose empirical ccdf is closest to the target
// on a log scale (only strictly interior ccdf values qualify)
std::ptrdiff_t threshold_near_ccdf(const simulate::empirical_stats& st, double target) {
  std::ptrdiff_t best = -1;
  double best_dist = 1e300;
  for (std::size_t j = 0; j < st.thresholds.n_elem; ++j) {
    const double c = empirical_ccdf(st, j).value;
    if (c <= 0.0 || c >= 1.0) continue;
    const double d = std::fabs(std::log(c) - std::log(target));
    if (d < best_dist) {
      best_dist = d;
      best = static_cast<std::ptrdiff_t>(j);
    }
  }
  return best;
}

// ---------------------------------------------------------------------------
// 1. Scalar crossing-rate closed form
// ---------------------------------------------------------------------------

outcome ac1() {
  const auto ctx = analytic::build_lcr_context({1, 0.5, 1.0}, {});
  double worst = 0.0;
  for (double s : {0.5, 1.0, 2.0, 4.0}) {
    const double ana = analytic::lcr_correlated(s, ctx, wide_quad());
    const double ref = std::sqrt(2.0 * kPi * s) * std::exp(-s);
    worst = std::max(worst, std::fabs(ana - ref) / ref);
  }
  return {worst < 1e-6,
          "max relative error vs sqrt(2 pi s) e^-s over s in {0.5,1,2,4}: " + fmt(worst)};
}

// ---------------------------------------------------------------------------
// 2. Crossing-rate transform vs Monte Carlo across geometries
// ---------------------------------------------------------------------------

outcome ac2() {
  struct config { unsigned m; double delta, lo, hi; };
  const config configs[] = {{4, 0.25, 1.0, 12.0}, {6, 0.25, 1.5, 14.0}, {4, 0.5, 1.0, 12.0}};
  bool ok = true;
  std::string detail;
  for (const auto& c : configs) {
    const correlation::array_geometry geo{c.m, c.delta, 1.0};
    const auto ctx = analytic::build_lcr_context(geo, {});
    const arma::vec th = experiments::make_thresholds({c.lo, c.hi, 8, true});
    simulate::sim_config sim;
    sim.realizations = 10000;
    sim.grid_points = 2048;
    sim.seed = 1001;
    const auto st = simulate::simulate_process(geo, {}, sim, th);
    double worst_margin = 0.0;  // |diff| / tolerance, keep the worst
    for (arma::uword j = 0; j < th.n_elem; ++j) {
      const double ana = analytic::lcr_correlated(th(j), ctx, wide_quad());
      const auto e = simulate::empirical_lcr(st, j);
      const double tol = std::max(0.10 * ana, 3.0 * e.std_err);
      const double margin = std::fabs(ana - e.rate) / tol;
      worst_margin = std::max(worst_margin, margin);
      if (margin > 1.0) ok = false;
    }
    if (!detail.empty()) detail += "; ";
    detail += "m=" + std::to_string(c.m) + " delta=" + fmt(c.delta) +
              ": worst |diff|/tol = " + fmt(worst_margin);
  }
  return {ok, detail + " (tol = max(10%, 3 std err), 8 thresholds each)"};
}

// ---------------------------------------------------------------------------
// 3. Distribution bound containment and tail tightness
// ---------------------------------------------------------------------------

outcome ac3() {
  const correlation::array_geometry geo{4, 0.25, 1.0};
  const arma::vec th = experiments::make_thresholds({2.0, 30.0, 25, true});

  arma::vec ccdf_bound(th.n_elem);
  for (arma::uword j = 0; j < th.n_elem; ++j) {
    ccdf_bound(j) =
        1.0 - analytic::cdf_lower_bound_correlated(th(j), geo, {}, wide_quad()).lower_bound_raw;
  }
  simulate::sim_config sim;
  sim.realizations = 100000;
  sim.grid_points = 2048;
  sim.seed = 1002;
  const auto st = simulate::simulate_process(geo, {}, sim, th);

  bool contained = true;
  double worst_margin = 1e300;
  for (arma::uword j = 0; j < th.n_elem; ++j) {
    const auto c = empirical_ccdf(st, j);
    const double margin = ccdf_bound(j) - c.lo;
    worst_margin = std::min(worst_margin, margin);
    if (margin < -1e-12) contained = false;
  }
  const std::ptrdiff_t jt = threshold_near_ccdf(st, 1e-2);
  if (jt < 0) return {false, "no interior threshold near ccdf = 1e-2"};
  const auto ct = empirical_ccdf(st, static_cast<std::size_t>(jt));
  const double gap = (ccdf_bound(jt) - ct.value) / ct.value;
  const bool tight = gap < 0.10;
  return {contained && tight,
          "containment margin >= " + fmt(worst_margin) + " over 25 thresholds; at s = " +
              fmt(th(jt)) + " (ccdf " + fmt(ct.value) + ") relative gap = " + fmt(gap)};
}

// ---------------------------------------------------------------------------
// 4. Fixed-position CDF vs direct hypoexponential sampling
// ---------------------------------------------------------------------------

outcome ac4() {
  bool ok = true;
  std::string detail;
  const double limit = 1.63 / 1000.0 + 1e-4;  // 1.63 / sqrt(1e6) + 1e-4
  int stream = 0;
  for (double delta : {0.1, 0.25, 0.5}) {
    const auto eig = analytic::decompose_sigma(correlation::build_sigma({4, delta, 1.0}));
    const std::size_t n = 1000000;
    simulate::philox_stream rng(1003, static_cast<std::uint64_t>(stream++));
    arma::vec samples(n);
    for (std::size_t i = 0; i < n; ++i) {
      double s = 0.0;
      for (unsigned k = 0; k < eig.rank; ++k) {
        s += eig.lambda(k) * -std::log(1.0 - rng.next_uniform());
      }
      samples(i) = s;
    }
    samples = arma::sort(samples);
    double ks = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double f = analytic::cdf_snr_fixed_correlated(samples(i), eig, {});
      ks = std::max(ks, std::fabs(f - static_cast<double>(i) / n));
      ks = std::max(ks, std::fabs(f - static_cast<double>(i + 1) / n));
    }
    if (ks >= limit) ok = false;
    if (!detail.empty()) detail += "; ";
    detail += "delta=" + fmt(delta) + ": KS " + fmt(ks);
  }

  // spacing at the first J0 root makes the two-element spectrum confluent;
  // the chain-form CDF must coincide with the order-2 gamma distribution
  const auto eig =
      analytic::decompose_sigma(correlation::build_sigma({2, kUncorrelatedSpacing, 1.0}));
  double worst = 0.0;
  for (int i = 1; i <= 200; ++i) {
    const double s = 0.1 * i;
    const double chain = analytic::cdf_snr_fixed_correlated(s, eig, {});
    const double gamma2 = numerics::regularized_lower_gamma(2, s);
    worst = std::max(worst, std::fabs(chain - gamma2));
  }
  if (worst >= 1e-8) ok = false;
  return {ok, detail + " (limit " + fmt(limit) + "); confluent-vs-gamma sup error " +
                  fmt(worst)};
}

// ---------------------------------------------------------------------------
// 5. Joint characteristic function vs direct sampling
// ---------------------------------------------------------------------------

outcome ac5() {
  const auto ctx = analytic::build_lcr_context({2, 0.25, 1.0}, {});
  const double probes[] = {-1.0, 0.3, 1.0};
  bool ok = true;
  double worst_sigma = 0.0;
  int k = 0;
  for (double t1 : probes) {
    for (double t2 : probes) {
      const std::complex<double> phi = analytic::joint_cf(ctx, t1, t2);
      const auto mc = simulate::mc_joint_cf(ctx, t1, t2, 1000000, 1004 + k++);
      const double sigmas = std::abs(phi - mc.value) / mc.std_err;
      worst_sigma = std::max(worst_sigma, sigmas);
      if (sigmas >= 3.0) ok = false;
    }
  }
  const double origin_err = std::abs(analytic::joint_cf(ctx, 0.0, 0.0) - 1.0);
  if (origin_err > 1e-12) ok = false;
  return {ok, "worst |analytic - mc| = " + fmt(worst_sigma) +
                  " std errs over 9 probes; |Phi(0,0) - 1| = " + fmt(origin_err)};
}

// ---------------------------------------------------------------------------
// 6. Derivative-variance trace identity
// ---------------------------------------------------------------------------

outcome ac6() {
  struct config { unsigned m; double delta; };
  const config configs[] = {{1, 0.5}, {2, 0.25}, {4, 0.5}};
  bool ok = true;
  std::string detail;
  int k = 0;
  for (const auto& c : configs) {
    const auto ctx = analytic::build_lcr_context({c.m, c.delta, 1.0}, {});
    const double expected = 4.0 * arma::trace(ctx.b * ctx.sigma);  // gbar = beta = 1
    const auto mc = simulate::mc_sdot_variance(ctx, 200000, 1010 + k++);
    const double sigmas = std::fabs(mc.value - expected) / mc.std_err;
    if (sigmas >= 3.0) ok = false;
    if (!detail.empty()) detail += "; ";
    detail += "m=" + std::to_string(c.m) + ": " + fmt(sigmas) + " std errs";
  }
  return {ok, detail + " (trace formula 4 gbar^2 beta tr(B Sigma))"};
}

// ---------------------------------------------------------------------------
// 7. Small-displacement covariance expansion
// ---------------------------------------------------------------------------

outcome ac7() {
  const correlation::array_geometry geo{4, 0.25, 1.0};
  const arma::mat sigma = correlation::build_sigma(geo);
  const arma::mat b = correlation::build_b_matrix(geo);
  double ratios[3];
  const double taus[3] = {1e-2, 1e-3, 1e-4};
  for (int i = 0; i < 3; ++i) {
    const arma::mat rem =
        correlation::cross_covariance(geo, taus[i]) - (sigma - b * taus[i] * taus[i]);
    ratios[i] = arma::abs(rem).max() / (taus[i] * taus[i]);
  }
  const bool ok = ratios[0] > ratios[1] && ratios[1] > ratios[2];
  return {ok, "remainder/tau^2 = " + fmt(ratios[0]) + " > " + fmt(ratios[1]) + " > " +
                  fmt(ratios[2]) + " (tau = 1e-2, 1e-3, 1e-4)"};
}

// ---------------------------------------------------------------------------
// 8. Qualitative orderings across systems
// ---------------------------------------------------------------------------

outcome ac8() {
  const arma::vec th = experiments::make_thresholds({0.5, 40.0, 49, true});
  simulate::sim_config base;
  base.realizations = 10000;
  base.seed = 1008;

  struct sys {
    const char* name;
    correlation::array_geometry geo;
    simulate::empirical_stats st;
  };
  std::vector<sys> systems = {
      {"SA", {1, 0.5, 0.0}, {}},          {"SFA", {1, 0.5, 1.0}, {}},
      {"FA4", {4, 0.5, 0.0}, {}},         {"MAA4(0.5)", {4, 0.5, 1.0}, {}},
      {"MAA4(0.1)", {4, 0.1, 1.0}, {}},   {"M4 d=0.25", {4, 0.25, 1.0}, {}},
      {"M6 d=0.25", {6, 0.25, 1.0}, {}},  {"MAA4(0.5) T=0.1", {4, 0.5, 0.1}, {}},
  };
  for (auto& s : systems) {
    simulate::sim_config cfg = base;
    cfg.grid_points = s.geo.span > 0.0 ? 2048 : 1;
    s.st = simulate::simulate_process(s.geo, {}, cfg, th);
  }
  auto find = [&](const char* name) -> const sys& {
    for (const auto& s : systems) {
      if (std::string(s.name) == name) return s;
    }
    throw std::logic_error("unknown system");
  };

  // each comparison is made at the grid threshold where the dominant
  // system's empirical ccdf is nearest 1e-2; separation requires the
  // dominated system's 95% interval to sit strictly below the dominant one's
  struct pairing { const char* worse; const char* better; const char* label; };
  const pairing pairs[] = {
      {"M4 d=0.25", "M6 d=0.25", "(a) antennas"},
      {"MAA4(0.5)", "MAA4(0.1)", "(b) spacing"},
      {"MAA4(0.5) T=0.1", "MAA4(0.5)", "(c) span"},
      {"SA", "SFA", "(d) SA < SFA"},
      {"SFA", "FA4", "(d) SFA < FA4"},
      {"FA4", "MAA4(0.5)", "(d) FA4 < MAA4(0.5)"},
      {"MAA4(0.5)", "MAA4(0.1)", "(d) MAA4(0.5) < MAA4(0.1)"},
  };
  bool ok = true;
  std::string detail;
  for (const auto& p : pairs) {
    const sys& worse = find(p.worse);
    const sys& better = find(p.better);
    const std::ptrdiff_t j = threshold_near_ccdf(better.st, 1e-2);
    bool sep = false;
    double cw_hi = 0.0, cb_lo = 0.0, at = 0.0;
    if (j >= 0) {
      const auto cw = empirical_ccdf(worse.st, static_cast<std::size_t>(j));
      const auto cb = empirical_ccdf(better.st, static_cast<std::size_t>(j));
      cw_hi = cw.hi;
      cb_lo = cb.lo;
      at = th(j);
      sep = cw.hi < cb.lo;
    }
    if (!sep) ok = false;
    if (!detail.empty()) detail += "; ";
    detail += std::string(p.label) + (sep ? " holds" : " VIOLATED") + " at s=" + fmt(at) +
              " (" + fmt(cw_hi) + " < " + fmt(cb_lo) + ")";
  }
  return {ok, detail};
}

// ---------------------------------------------------------------------------
// 9. Printed independent-branch crossing-rate adjudication
// ---------------------------------------------------------------------------

outcome ac9() {
  experiments::experiment_config cfg = experiments::preset("validate");
  cfg.output_path = "acceptance_validate_report.txt";
  const int rc = experiments::run(cfg);
  std::ifstream in(cfg.output_path);
  std::ostringstream ss;
  ss << in.rdbuf();
  const std::string report = ss.str();
  const bool flagged =
      report.find("CHECK printed_unc_lcr_vs_oracle: FLAGGED") != std::string::npos;
  const bool ratios = report.find("ratio") != std::string::npos;
  return {rc == 0 && flagged && ratios,
          std::string("validate exit ") + std::to_string(rc) +
              (flagged ? ", discrepancy ratios reported as FLAGGED"
                       : ", FLAGGED line missing") +
              " (report: " + cfg.output_path + ")"};
}

// ---------------------------------------------------------------------------
// 10. Byte-identical output across worker-thread counts
// ---------------------------------------------------------------------------

outcome ac10() {
  std::vector<std::string> contents;
  for (unsigned threads : {1u, 4u, 8u}) {
    experiments::experiment_config cfg = experiments::preset("fig2c");
    cfg.sim.threads = threads;
    cfg.output_path = "acceptance_det_" + std::to_string(threads) + ".csv";
    if (experiments::run(cfg) != 0) return {false, "preset fig2c failed to run"};
    std::ifstream in(cfg.output_path, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    contents.push_back(ss.str());
    std::remove(cfg.output_path.c_str());
  }
  const bool same = contents[0] == contents[1] && contents[1] == contents[2];
  return {same && !contents[0].empty(),
          same ? "preset fig2c CSV byte-identical for 1, 4, 8 worker threads ("
                     + std::to_string(contents[0].size()) + " bytes)"
               : "outputs differ across thread counts"};
}

}  // namespace

int main(int argc, char** argv) {
  struct entry {
    const char* name;
    std::function<outcome()> fn;
    double budget_seconds;
  };
  const entry entries[] = {
      {"ac1", ac1, 1.0},    {"ac2", ac2, 600.0}, {"ac3", ac3, 1200.0},
      {"ac4", ac4, 60.0},   {"ac5", ac5, 60.0},  {"ac6", ac6, 60.0},
      {"ac7", ac7, 1.0},    {"ac8", ac8, 900.0}, {"ac9", ac9, 300.0},
      {"ac10", ac10, 0.0},  // no stated budget
  };

  std::vector<std::string> selected(argv + 1, argv + argc);
  int failures = 0;
  for (const auto& e : entries) {
    if (!selected.empty() &&
        std::find(selected.begin(), selected.end(), e.name) == selected.end()) {
      continue;
    }
    const auto start = std::chrono::steady_clock::now();
    outcome out;
    try {
      out = e.fn();
    } catch (const std::exception& ex) {
      out = {false, std::string("exception: ") + ex.what()};
    }
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    bool pass = out.pass;
    std::string note;
    if (e.budget_seconds > 0.0 && secs > e.budget_seconds) {
      pass = false;
      note = " [over the " + fmt(e.budget_seconds) + " s budget]";
    }
    std::printf("%s %s: %s (%.1f s)%s\n", e.name, pass ? "PASS" : "FAIL",
                out.detail.c_str(), secs, note.c_str());
    std::fflush(stdout);
    if (!pass) ++failures;
  }
  return failures;
}
