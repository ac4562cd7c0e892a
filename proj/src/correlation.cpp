// SPDX-License-Identifier: Apache-2.0
// Copyright (c) 2026 maa contributors

#include "maa/correlation.hpp"

#include <cmath>
#include <stdexcept>

#include "maa/numerics.hpp"

namespace maa::correlation {

namespace {
constexpr double kTwoPi = 6.283185307179586476925286766559;
constexpr double kPiSquared = 9.869604401089358618834490999876;
}  // namespace

void validate(const array_geometry& g) {
  if (g.m == 0) throw std::invalid_argument("array_geometry: m must be >= 1");
  if (!std::isfinite(g.delta) || g.delta < 0.0) {
    throw std::domain_error("array_geometry: delta must be finite and >= 0");
  }
  if (g.m > 1 && g.delta == 0.0) {
    throw std::domain_error("array_geometry: delta must be positive for m > 1");
  }
  if (!std::isfinite(g.span) || g.span < 0.0) {
    throw std::domain_error("array_geometry: span must be finite and >= 0");
  }
}

void validate(const channel_params& p) {
  if (!std::isfinite(p.beta) || p.beta <= 0.0) {
    throw std::domain_error("channel_params: beta must be finite and > 0");
  }
  if (!std::isfinite(p.symbol_energy) || p.symbol_energy <= 0.0) {
    throw std::domain_error("channel_params: symbol_energy must be finite and > 0");
  }
  if (!std::isfinite(p.noise_var) || p.noise_var <= 0.0) {
    throw std::domain_error("channel_params: noise_var must be finite and > 0");
  }
}

double spatial_correlation(double distance) {
  return numerics::bessel_j0(kTwoPi * distance);
}

double pair_distance(double tau, double delta, int r, int s) {
  const double lateral = delta * (r - s);
  return std::hypot(tau, lateral);
}

arma::mat build_sigma(const array_geometry& g) {
  validate(g);
  arma::mat sigma(g.m, g.m);
  // Toeplitz: one correlation value per element-index lag.
  arma::vec by_lag(g.m);
  for (unsigned k = 0; k < g.m; ++k) {
    by_lag(k) = spatial_correlation(k * g.delta);
  }
  for (unsigned r = 0; r < g.m; ++r) {
    for (unsigned s = 0; s < g.m; ++s) {
      sigma(r, s) = by_lag(r > s ? r - s : s - r);
    }
  }
  return sigma;
}

arma::mat build_b_matrix(const array_geometry& g) {
  validate(g);
  arma::mat b(g.m, g.m);
  arma::vec by_lag(g.m);
  by_lag(0) = kPiSquared;
  for (unsigned k = 1; k < g.m; ++k) {
    const double d = k * g.delta;
    by_lag(k) = arma::datum::pi * numerics::bessel_j1(kTwoPi * d) / d;
  }
  for (unsigned r = 0; r < g.m; ++r) {
    for (unsigned s = 0; s < g.m; ++s) {
      b(r, s) = by_lag(r > s ? r - s : s - r);
    }
  }
  return b;
}

arma::mat cross_covariance(const array_geometry& g, double tau) {
  validate(g);
  if (!std::isfinite(tau)) throw std::domain_error("cross_covariance: tau must be finite");
  arma::mat c(g.m, g.m);
  arma::vec by_lag(g.m);
  for (unsigned k = 0; k < g.m; ++k) {
    by_lag(k) = spatial_correlation(pair_distance(tau, g.delta, static_cast<int>(k), 0));
  }
  for (unsigned r = 0; r < g.m; ++r) {
    for (unsigned s = 0; s < g.m; ++s) {
      c(r, s) = by_lag(r > s ? r - s : s - r);
    }
  }
  return c;
}

arma::vec position_grid(double span, std::size_t n) {
  if (n == 0) throw std::invalid_argument("position_grid: n must be >= 1");
  if (!std::isfinite(span) || span < 0.0) {
    throw std::domain_error("position_grid: span must be finite and >= 0");
  }
  if (n == 1) return arma::vec{0.0};
  if (span == 0.0) {
    throw std::invalid_argument("position_grid: span must be positive when n > 1");
  }
  return arma::linspace(0.0, span, n);
}

arma::mat grid_covariance(const array_geometry& g, const arma::vec& grid) {
  validate(g);
  const std::size_t n = grid.n_elem;
  if (n == 0) throw std::invalid_argument("grid_covariance: grid must be non-empty");
  if (!grid.is_finite()) throw std::domain_error("grid_covariance: grid must be finite");
  for (std::size_t k = 1; k < n; ++k) {
    if (!(grid(k) > grid(k - 1))) {
      throw std::invalid_argument("grid_covariance: grid must be strictly increasing");
    }
  }
  const std::size_t mn = static_cast<std::size_t>(g.m) * n;
  if (mn > 20000) {
    throw std::invalid_argument("grid_covariance: m * n exceeds the supported size (20000)");
  }

  arma::mat c(mn, mn);

  // Uniform grids make the matrix block-Toeplitz: only n * m distinct
  // entries, one per (position lag, element lag) pair.
  bool uniform = n >= 2;
  const double step = n >= 2 ? (grid(n - 1) - grid(0)) / static_cast<double>(n - 1) : 0.0;
  for (std::size_t k = 1; uniform && k < n; ++k) {
    if (std::abs(grid(k) - grid(k - 1) - step) > 1e-12 * std::max(1.0, std::abs(step))) {
      uniform = false;
    }
  }

  if (uniform || n == 1) {
    arma::mat table(g.m, n);
    for (std::size_t dk = 0; dk < n; ++dk) {
      for (unsigned di = 0; di < g.m; ++di) {
        table(di, dk) = spatial_correlation(
            pair_distance(dk * step, g.delta, static_cast<int>(di), 0));
      }
    }
    for (std::size_t k = 0; k < n; ++k) {
      for (std::size_t l = 0; l <= k; ++l) {
        const std::size_t dk = k - l;
        for (unsigned i = 0; i < g.m; ++i) {
          for (unsigned j = 0; j < g.m; ++j) {
            const unsigned di = i > j ? i - j : j - i;
            const double v = table(di, dk);
            c(k * g.m + i, l * g.m + j) = v;
            c(l * g.m + j, k * g.m + i) = v;
          }
        }
      }
    }
  } else {
    for (std::size_t k = 0; k < n; ++k) {
      for (std::size_t l = 0; l <= k; ++l) {
        const double dt = grid(k) - grid(l);
        for (unsigned i = 0; i < g.m; ++i) {
          for (unsigned j = 0; j < g.m; ++j) {
            const double v = spatial_correlation(
                pair_distance(dt, g.delta, static_cast<int>(i), static_cast<int>(j)));
            c(k * g.m + i, l * g.m + j) = v;
            c(l * g.m + j, k * g.m + i) = v;
          }
        }
      }
    }
  }
  return c;
}

}  // namespace maa::correlation
