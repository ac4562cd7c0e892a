// SPDX-License-Identifier: Apache-2.0
// Copyright (c) 2026 maa contributors
//
// Slow, independent reference implementations used only by the tests.
// Each one deliberately uses a different algorithm from the library code it
// checks, so agreement is evidence rather than tautology.

#pragma once

#include <cmath>
#include <stdexcept>
#include <vector>

namespace oracles {

// Bessel J_n(x) for n in {0, 1} by Miller's downward recurrence with the
// normalization J0 + 2*sum_k J_{2k} = 1.  Works across the whole range the
// library cares about; accuracy is limited only by the start order.
inline double bessel_j(int n, double x) {
  if (n < 0 || n > 1) throw std::invalid_argument("oracle bessel: n must be 0 or 1");
  const double ax = std::fabs(x);
  if (ax == 0.0) return n == 0 ? 1.0 : 0.0;
  // start well above the turning point; downward recurrence is stable
  int start = static_cast<int>(ax + 20.0 * std::sqrt(ax + 1.0) + 40.0);
  if (start % 2 == 1) ++start;
  long double jp = 0.0L;   // J_{k+1}
  long double jc = 1e-30L; // J_k (arbitrary seed)
  long double norm = 0.0L;
  long double j0 = 0.0L, j1 = 0.0L;
  const long double lx = static_cast<long double>(ax);
  for (int k = start; k >= 0; --k) {
    const long double jm = (2.0L * (k + 1)) / lx * jc - jp;
    jp = jc;
    jc = jm;
    if (k % 2 == 0 && k > 0) norm += 2.0L * jc;
    if (k == 1) j1 = jc;
    if (k == 0) j0 = jc;
    // rescale to avoid overflow of the unnormalized recurrence
    if (std::fabs(static_cast<double>(jc)) > 1e280) {
      jc *= 1e-280L;
      jp *= 1e-280L;
      norm *= 1e-280L;
      j0 *= 1e-280L;
      j1 *= 1e-280L;
    }
  }
  norm += j0;
  const long double v = (n == 0 ? j0 : j1) / norm;
  double out = static_cast<double>(v);
  if (x < 0.0 && n == 1) out = -out; // J1 is odd; J0 is even
  return out;
}

// Regularized lower incomplete gamma P(m, x) for integer m >= 1 via the
// Poisson-tail identity P(m, x) = P[Poisson(x) >= m], summing the pmf upward
// from k = m in extended precision.
inline double gamma_p(unsigned m, double x) {
  if (m == 0) throw std::invalid_argument("oracle gamma_p: m must be >= 1");
  if (x <= 0.0) return 0.0;
  long double logterm = m * std::log(static_cast<long double>(x)) - x;
  for (unsigned k = 2; k <= m; ++k) logterm -= std::log(static_cast<long double>(k));
  long double term = std::exp(logterm);
  long double sum = term;
  const long double lx = static_cast<long double>(x);
  for (unsigned k = m; k < m + 200000; ++k) {
    term *= lx / (k + 1);
    sum += term;
    if (term < 1e-24L * sum && k > static_cast<unsigned>(x)) break;
  }
  if (sum > 1.0L) sum = 1.0L;
  return static_cast<double>(sum);
}

// Trapezoid cumulative-distribution estimate from sorted samples, for
// Kolmogorov-Smirnov style comparisons in tests.
inline double ks_distance(const std::vector<double>& sorted_samples,
                          const std::vector<double>& model_cdf_at_samples) {
  const std::size_t n = sorted_samples.size();
  if (model_cdf_at_samples.size() != n || n == 0) {
    throw std::invalid_argument("oracle ks: size mismatch");
  }
  double d = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double f = model_cdf_at_samples[i];
    d = std::max(d, std::fabs(f - static_cast<double>(i) / n));
    d = std::max(d, std::fabs(f - static_cast<double>(i + 1) / n));
  }
  return d;
}

}  // namespace oracles
