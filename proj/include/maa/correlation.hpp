// SPDX-License-Identifier: Apache-2.0
// Copyright (c) 2026 maa contributors

#pragma once

#include <cstddef>

#include <armadillo>

namespace maa::correlation {

// Uniform linear array of m elements at spacing delta (in carrier
// wavelengths) that can translate along its own axis over [0, span].
struct array_geometry {
  unsigned m = 1;
  double delta = 0.5;
  double span = 1.0;
};

// Link-budget scalars. mean_branch_snr is the average SNR seen by a single
// branch under unit-power fading.
struct channel_params {
  double beta = 1.0;
  double symbol_energy = 1.0;
  double noise_var = 1.0;

  double mean_branch_snr() const { return symbol_energy * beta / noise_var; }
};

// Throw std::invalid_argument / std::domain_error when fields are out of range.
void validate(const array_geometry& g);
void validate(const channel_params& p);

// Isotropic-scattering spatial correlation at separation `distance`
// (wavelengths): J0(2 pi distance).
double spatial_correlation(double distance);

// Distance between element r displaced by tau and element s at the reference
// position: sqrt(tau^2 + delta^2 (r - s)^2).
double pair_distance(double tau, double delta, int r, int s);

// m x m static covariance of the branch gains: Toeplitz with entries
// J0(2 pi |r - s| delta).
arma::mat build_sigma(const array_geometry& g);

// m x m small-displacement curvature matrix: the covariance expands as
// Sigma - B tau^2 + o(tau^2). Diagonal pi^2; off-diagonal
// pi J1(2 pi |r - s| delta) / (|r - s| delta). Requires delta > 0 when m > 1.
arma::mat build_b_matrix(const array_geometry& g);

// m x m cross-covariance between the array at displacement tau and at the
// reference position: entries J0(2 pi d_rs(tau)).
arma::mat cross_covariance(const array_geometry& g, double tau);

// n uniformly spaced positions covering [0, span]. n == 1 returns {0}
// (fixed array); otherwise span must be positive.
arma::vec position_grid(double span, std::size_t n);

// Full covariance of the m branch gains sampled at every grid position,
// position-major: row/col index = k * m + i for grid point k, element i.
// Guards the problem size at m * n <= 20000.
arma::mat grid_covariance(const array_geometry& g, const arma::vec& grid);

}  // namespace maa::correlation
