// SPDX-License-Identifier: Apache-2.0
// Copyright (c) 2026 maa contributors
//
// Self-contained numerical kernel: Bessel functions of the first kind,
// regularized incomplete gamma for integer order, adaptive Gauss-Kronrod
// quadrature over the real line, and validated eigen/matrix-root wrappers.

#pragma once

#include <armadillo>
#include <complex>
#include <cstddef>
#include <functional>

#include "maa/errors.hpp"

namespace maa::numerics {

/// Tolerances and budgets for integrate_real_line.
struct quadrature_spec {
  double abs_tol = 1e-9;
  double rel_tol = 1e-7;
  std::size_t max_panels = 4096;
  /// Tail blocks whose contribution falls below this (or below a tenth of the
  /// running error target, whichever is larger) stop the domain extension.
  double truncation_threshold = 1e-12;
  /// Optional hint: asymptotic period of the integrand's oscillation. When
  /// positive, the tail is summed in half-period cells and extrapolated to
  /// its limit (Wynn epsilon), which closes slowly decaying oscillatory
  /// tails in O(10) cells instead of chasing them panel by panel. Zero
  /// disables the acceleration.
  double oscillation_period = 0.0;
  /// Optional hint: relative noise carried by each integrand evaluation
  /// (e.g. eps * cond for values derived from an ill-conditioned
  /// eigenproblem). Panel error estimates are floored at this fraction of
  /// the panel's |f| integral and panels at their floor are never split
  /// again, since refinement cannot beat evaluation noise. Zero means
  /// evaluations are accurate to machine rounding.
  double noise_floor_rel = 0.0;
};

struct integral_result {
  std::complex<double> value{};
  double error = 0.0;        ///< estimated absolute error
  std::size_t panels = 0;    ///< panels evaluated
  double t_max = 0.0;        ///< truncation point actually used
};

/// Bessel function J0. Power series below |x| = 17.5, Hankel asymptotic
/// expansion beyond; absolute error <= 1e-12 for |x| <= 500.
double bessel_j0(double x);

/// Bessel function J1, same scheme and error budget as bessel_j0.
double bessel_j1(double x);

/// Regularized lower incomplete gamma P(m, x) for integer order m >= 1.
double regularized_lower_gamma(unsigned m, double x);

using real_line_integrand = std::function<std::complex<double>(double)>;

/// Integral of f over the whole real line. With hermitian = true the
/// integrand is assumed to satisfy f(-t) = conj(f(t)) and only t >= 0 is
/// evaluated (the result is then 2*Re of the half-line integral).
/// Throws quadrature_convergence_error when max_panels is exhausted before
/// the error target max(abs_tol, rel_tol*|I|) is met.
integral_result integrate_real_line(const real_line_integrand& f,
                                    const quadrature_spec& spec = {},
                                    bool hermitian = false);

struct eig_sym_result {
  arma::vec values;      ///< descending
  arma::cx_mat vectors;  ///< columns match values
};

/// Eigendecomposition of a Hermitian matrix. Input asymmetry beyond
/// 1e-10 * max(1, max|a_ij|) is a domain error.
eig_sym_result hermitian_eig(const arma::cx_mat& a);

/// Real symmetric convenience overload; eigenvectors are real-valued.
eig_sym_result hermitian_eig(const arma::mat& a);

/// Eigenvalues of a general complex square matrix, sorted by (real, imag).
/// Closed forms for 1x1 and 2x2; LAPACK beyond.
arma::cx_vec general_complex_eig(const arma::cx_mat& a);

/// Symmetric PSD square root. Eigenvalues below -1e-10 * ||a||_2 raise
/// not_psd_error; small negatives are clipped to zero.
arma::mat psd_sqrt(const arma::mat& a);

}  // namespace maa::numerics
