// SPDX-License-Identifier: Apache-2.0
// Copyright (c) 2026 maa contributors
//
// Monte Carlo ground truth: samples the spatially correlated complex
// Gaussian channel field over a position grid and turns the realizations
// into empirical CDF / supremum-CDF / crossing-rate statistics, plus
// direct-sampling estimators for the characteristic-function and
// derivative-variance identities.

#pragma once

#include <complex>
#include <cstddef>
#include <cstdint>
#include <string>

#include <armadillo>

#include "maa/analytic.hpp"
#include "maa/correlation.hpp"
#include "maa/rng.hpp"

namespace maa::simulate {

struct sim_config {
  std::size_t realizations = 10000;
  std::size_t grid_points = 2048;
  std::uint64_t seed = 1;
  // 0 = resolve from the MAA_THREADS environment variable, default 1.
  // Worker threads only partition fixed-width realization batches, so the
  // output is identical for every thread count.
  unsigned threads = 0;
};

void validate(const sim_config& cfg, const correlation::array_geometry& g);

// Eigen-factorization of a grid covariance with negative-eigenvalue
// clipping: l * l^T reconstructs the clipped matrix. spectrum holds the
// retained eigenvalues (descending), clipped_mass the total negative mass
// removed, fro_residual the Frobenius reconstruction error.
struct covariance_factor {
  arma::mat l;
  arma::vec spectrum;
  double clipped_mass = 0.0;
  double fro_residual = 0.0;
  std::size_t n = 0;
};

// Factor a symmetric PSD grid covariance. Large matrices use a randomized
// subspace eigensolver (the correlation kernel is band-limited, so the
// numerical rank is far below n) with an exact Frobenius residual check;
// the contract is fro_residual <= 1e-6 * ||c||_F. Clipped negative mass
// above 1e-3 * trace(c) throws not_psd_error.
covariance_factor factorize_grid_covariance(const arma::mat& c);

// One realization of the channel field over the grid: h is m x n with
// h(i, k) ~ CN(0, beta) at element i, grid point k; snr(k) is the combined
// SNR (symbol_energy / noise_var) * sum_i |h(i, k)|^2.
struct field_realization {
  arma::vec positions;
  arma::cx_mat h;
  arma::vec snr;
};

// Draws vec(h) / sqrt(beta) = l * z with z i.i.d. circular complex standard
// normal, consuming factor.l.n_cols draws from the stream. Layout is
// position-major: stacked index k * m + i.
field_realization sample_field(const covariance_factor& factor,
                               const correlation::array_geometry& g, const arma::vec& grid,
                               const correlation::channel_params& params, philox_stream& rng);

// Up-crossings of the threshold on the sampled trace:
// #{k : snr[k] <= s_th < snr[k+1]}.
std::size_t count_upcrossings(const arma::vec& snr, double s_th);

// Aggregated per-realization statistics. crossing_counts is thresholds x
// realizations; position_mean is the per-grid-point mean SNR;
// mean_positive_variation is the average total rise of the trace per unit
// length (the threshold-integral of the crossing rate).
struct empirical_stats {
  arma::vec thresholds;
  arma::vec sup_samples;
  arma::umat crossing_counts;
  arma::vec position_mean;
  double mean_positive_variation = 0.0;
  double span = 0.0;
  std::size_t realizations = 0;
};

// Runs the full pipeline: grid, covariance, factorization, realization
// sweep, aggregation. Realizations use independent streams keyed by
// (cfg.seed, realization index); results are bit-identical for every
// thread count. Optional trace_dump_path writes one CSV row of the SNR
// trace per realization (position index ascending); refused when
// realizations * grid_points exceeds 2^26.
empirical_stats simulate_process(const correlation::array_geometry& g,
                                 const correlation::channel_params& params,
                                 const sim_config& cfg, const arma::vec& thresholds,
                                 const std::string& trace_dump_path = {});

struct rate_estimate {
  double rate = 0.0;
  double std_err = 0.0;
};

// Mean crossings per unit length across realizations at
// stats.thresholds(threshold_index), with the standard error of the mean.
// Requires span > 0.
rate_estimate empirical_lcr(const empirical_stats& stats, std::size_t threshold_index);

struct proportion {
  double fraction = 0.0;
  double ci_low = 0.0;
  double ci_high = 0.0;
};

// Fraction of realizations whose grid maximum is <= the threshold, with a
// 95% Wilson interval. The grid maximum lower-bounds the true supremum, so
// this estimates an upper bound on the supremum CDF.
proportion empirical_sup_cdf(const empirical_stats& stats, std::size_t threshold_index);

struct mc_cf_estimate {
  std::complex<double> value;
  double std_err = 0.0;  // sqrt((var_re + var_im) / samples)
};

// Sample mean of exp(j t1 v^H sigma v + j t2 v^H q v) over i.i.d. circular
// complex standard normal m-vectors v.
mc_cf_estimate mc_joint_cf(const analytic::lcr_context& ctx, double t1, double t2,
                           std::size_t samples, std::uint64_t seed);

struct mc_estimate {
  double value = 0.0;
  double std_err = 0.0;
};

// Sample mean of 4 gbar^2 h^H B h over h ~ CN(0, beta sigma); its
// expectation is 4 gbar^2 beta trace(B sigma).
mc_estimate mc_sdot_variance(const analytic::lcr_context& ctx, std::size_t samples,
                             std::uint64_t seed);

}  // namespace maa::simulate
