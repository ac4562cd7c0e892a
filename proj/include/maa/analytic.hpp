// SPDX-License-Identifier: Apache-2.0
// Copyright (c) 2026 maa contributors
//
// Closed-form and semi-closed-form performance quantities for the movable
// array: static SNR CDFs (gamma / hypoexponential), level crossing rates
// (closed-form independent-branch expression and the characteristic-function
// inversion integral for correlated branches), and the translation-span CDF
// lower bound combining the two.

#pragma once

#include <complex>

#include <armadillo>

#include "maa/correlation.hpp"
#include "maa/numerics.hpp"

namespace maa::analytic {

// Clipped eigensystem of the branch covariance. lambda is descending with
// negatives clipped to zero; rank counts the entries above the drop
// threshold (1e-10 * lambda_max); vectors holds the full orthonormal basis.
struct sigma_eigen {
  arma::vec lambda;
  arma::mat vectors;
  unsigned rank = 0;
};

// Eigendecomposition of a branch covariance from build_sigma. Checks the
// unit-diagonal trace property (sum lambda = m) and positive
// semi-definiteness up to rounding.
sigma_eigen decompose_sigma(const arma::mat& sigma);

// Immutable derived matrices for the crossing-rate integral:
//   q     = 4 gbar^2 sigma^{1/2} B sigma^{1/2}   (symmetric PD)
//   f     = q^{-1/2} sigma q^{-1/2}
//   det_q = det(q)
struct lcr_context {
  arma::mat sigma;
  arma::mat b;
  arma::mat q;
  arma::mat q_inv;
  arma::mat f;
  double det_q = 0.0;
  double cond_q = 1.0;    // spectral condition number of q; tightly spaced
                          // arrays make q nearly singular, and eps * cond_q
                          // bounds the relative accuracy of anything derived
                          // from its spectrum
  double mean_snr = 0.0;  // gbar = symbol_energy * beta / noise_var
  unsigned m = 0;
  correlation::array_geometry geometry;
  correlation::channel_params params;
};

// Builds the context from geometry and link parameters. Throws
// singular_context_error when q is numerically singular
// (condition number > 1e12 or a non-positive eigenvalue).
lcr_context build_lcr_context(const correlation::array_geometry& geometry,
                              const correlation::channel_params& params);

// One evaluation of the translation-span CDF lower bound at threshold s_th:
//   lower_bound_raw = fixed_cdf_term - span * lcr_term,
//   lower_bound_clamped = max(0, raw).
// The raw value can be negative at low thresholds; the bound is tight only
// for large thresholds.
struct bound_result {
  double threshold = 0.0;
  double fixed_cdf_term = 0.0;
  double lcr_term = 0.0;
  double lower_bound_raw = 0.0;
  double lower_bound_clamped = 0.0;
};

// CDF of the maximum-ratio-combined SNR of m independent unit-power
// branches at a fixed position: regularized lower gamma of order m at
// s_th / gbar. Negative s_th returns 0.
double cdf_snr_fixed_uncorrelated(double s_th, unsigned m,
                                  const correlation::channel_params& params);

// Closed-form independent-branch crossing rate, evaluated exactly as the
// source expression is printed:
//   sqrt(b) / (sqrt(2 pi) (m-1)!) * (s_th / gbar)^(2m-1) * exp(-s_th / gbar).
// The m = 1 reduction of this expression disagrees with the scalar limit of
// the correlated integral (and with simulation) by a factor
// (1/2) (s_th/gbar)^(m - 1/2); run_validate reports that ratio rather than
// silently correcting it. b is the curvature scale (pi^2 for the isotropic
// model).
double lcr_uncorrelated(double s_th, unsigned m, const correlation::channel_params& params,
                        double b);

// Bound combining the gamma CDF with the printed independent-branch
// crossing rate over the geometry's span.
bound_result cdf_lower_bound_uncorrelated(double s_th,
                                          const correlation::array_geometry& geometry,
                                          const correlation::channel_params& params, double b);

// CDF of the combined SNR at a fixed position with correlated branches:
// hypoexponential mixture over the retained eigenvalues,
//   1 - sum_i exp(-s_th / (lambda_i gbar)) / prod_{j != i} (1 - lambda_j / lambda_i).
// Eigenvalue pairs closer than 1e-6 * lambda_max switch to the phase-type
// matrix-exponential evaluation, which handles confluent spectra exactly.
double cdf_snr_fixed_correlated(double s_th, const sigma_eigen& eig,
                                const correlation::channel_params& params);

// Eigenvalues of g(t1) = q^{-1} - j t1 f, sorted by (real, imag). All real
// parts are positive for a valid context (the field of values of g lies in
// the open right half-plane); a violation throws numerical_range_error.
arma::cx_vec g_eigenvalues(const lcr_context& ctx, double t1);

// Simple-pole partial fraction coefficients a_i = prod_{k != i} (g_k - g_i)^{-1}
// satisfying sum_i a_i / (g_i - z) = prod_i (g_i - z)^{-1}. Pairs closer than
// 1e-9 * max |g| throw eigenvalue_collision_error.
arma::cx_vec partial_fraction_coeffs(const arma::cx_vec& g);

// Joint characteristic function of s = v^H sigma v and p = v^H q v for
// v ~ CN(0, I_m):  1 / (det_q * prod_i (g_i(t1) - j t2)).
// The t2 = 0 marginal reduces to prod_i (1 - j t1 lambda_i)^{-1}.
std::complex<double> joint_cf(const lcr_context& ctx, double t1, double t2);

// Crossing rate of the combined-SNR process across level s_th for
// correlated branches, by numerical inversion:
//   1 / (4 sqrt(2) pi det_q * gbar) *
//     integral over t1 of sum_i a_i g_i^{-3/2} exp(-j t1 s_th / gbar).
// Uses the Hermitian symmetry of the integrand; eigenvalue collisions at a
// node are retried at a perturbed node and finally merged into a
// second-order (confluent) residue. Returns 0 at s_th = 0.
double lcr_correlated(double s_th, const lcr_context& ctx,
                      const numerics::quadrature_spec& spec = {});

// Bound combining the hypoexponential CDF with the correlated crossing rate
// over the geometry's span. A zero span skips the crossing-rate integral
// (the bound reduces to the static CDF and lcr_term is reported as 0).
bound_result cdf_lower_bound_correlated(double s_th,
                                        const correlation::array_geometry& geometry,
                                        const correlation::channel_params& params,
                                        const numerics::quadrature_spec& spec = {});

}  // namespace maa::analytic
