// SPDX-License-Identifier: Apache-2.0
// Copyright (c) 2026 maa contributors
//
// Library-specific exception types. Precondition violations on plain inputs
// throw std::invalid_argument / std::domain_error directly; the types here
// carry extra state or mark numerical failure modes callers may want to
// distinguish.

#pragma once

#include <complex>
#include <cstddef>
#include <stdexcept>
#include <string>

namespace maa {

/// Adaptive quadrature ran out of panels before reaching the requested
/// tolerance. Carries the best estimate and the error actually achieved.
class quadrature_convergence_error : public std::runtime_error {
 public:
  quadrature_convergence_error(const std::string& msg, std::complex<double> best_estimate,
                               double achieved_error, std::size_t panels_used)
      : std::runtime_error(msg),
        best_estimate_(best_estimate),
        achieved_error_(achieved_error),
        panels_used_(panels_used) {}

  std::complex<double> best_estimate() const { return best_estimate_; }
  double achieved_error() const { return achieved_error_; }
  std::size_t panels_used() const { return panels_used_; }

 private:
  std::complex<double> best_estimate_;
  double achieved_error_;
  std::size_t panels_used_;
};

/// Eigenvalues closer than the collision threshold; simple-pole partial
/// fractions are ill-defined there.
class eigenvalue_collision_error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A matrix required to be (numerically) positive semi-definite was not.
class not_psd_error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Geometry or derived matrices too ill-conditioned to proceed.
class singular_context_error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// An eigenvalue left the half-plane its field-of-values argument pins it
/// to; signals a broken or inconsistent context rather than a bad input.
class numerical_range_error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace maa
