// SPDX-License-Identifier: Apache-2.0
// Copyright (c) 2026 maa contributors

#include "maa/analytic.hpp"

#include <cmath>
#include <complex>
#include <stdexcept>
#include <vector>

#include "maa/errors.hpp"

namespace maa::analytic {

namespace {

constexpr double kPi = 3.141592653589793238462643383279503;

// Relative scale below which two eigenvalues count as colliding for
// simple-pole partial fractions.
constexpr double kCollisionRel = 1e-9;

// Relative gap below which the hypoexponential closed form is abandoned for
// the phase-type evaluation.
constexpr double kDegeneracyRel = 1e-6;

// Eigenvalues of the static covariance smaller than this (relative to the
// largest) carry no probability mass in the combined SNR and are dropped.
constexpr double kRankDropRel = 1e-10;

// Tolerance floors for the crossing-rate integral when the integrand's
// eigendecomposition noise (eps * cond(q)) exceeds the requested accuracy:
// the absolute floor covers noise accumulated across the integrand's
// support (a few oscillation widths around the peak), the relative floor a
// safety margin over the per-evaluation noise itself.
constexpr double kEvalNoiseWidthFactor = 32.0;
constexpr double kEvalNoiseRelFactor = 8.0;

}  // namespace

sigma_eigen decompose_sigma(const arma::mat& sigma) {
  numerics::eig_sym_result es = numerics::hermitian_eig(sigma);
  const double lmax = es.values.max();
  if (!(lmax > 0.0)) throw not_psd_error("decompose_sigma: covariance has no positive eigenvalue");
  arma::vec lam = es.values;
  for (arma::uword i = 0; i < lam.n_elem; ++i) {
    if (lam(i) < -1e-10 * lmax) {
      throw not_psd_error("decompose_sigma: covariance has a significantly negative eigenvalue");
    }
    lam(i) = std::max(lam(i), 0.0);
  }
  const double m = static_cast<double>(sigma.n_rows);
  if (std::abs(arma::accu(lam) - m) > 1e-8 * m) {
    throw std::invalid_argument("decompose_sigma: trace differs from m; not a correlation matrix");
  }
  sigma_eigen out;
  out.lambda = lam;
  out.vectors = arma::real(es.vectors);
  out.rank = static_cast<unsigned>(arma::accu(lam > kRankDropRel * lmax));
  return out;
}

double cdf_snr_fixed_uncorrelated(double s_th, unsigned m,
                                  const correlation::channel_params& params) {
  correlation::validate(params);
  if (m == 0) throw std::invalid_argument("cdf_snr_fixed_uncorrelated: m must be >= 1");
  if (!std::isfinite(s_th)) throw std::domain_error("cdf_snr_fixed_uncorrelated: s_th not finite");
  if (s_th <= 0.0) return 0.0;
  return numerics::regularized_lower_gamma(m, s_th / params.mean_branch_snr());
}

double lcr_uncorrelated(double s_th, unsigned m, const correlation::channel_params& params,
                        double b) {
  correlation::validate(params);
  if (m == 0) throw std::invalid_argument("lcr_uncorrelated: m must be >= 1");
  if (!std::isfinite(b) || b <= 0.0) throw std::domain_error("lcr_uncorrelated: b must be > 0");
  if (!std::isfinite(s_th) || s_th < 0.0) {
    throw std::domain_error("lcr_uncorrelated: s_th must be >= 0");
  }
  const double x = s_th / params.mean_branch_snr();
  return std::sqrt(b) / (std::sqrt(2.0 * kPi) * std::tgamma(static_cast<double>(m))) *
         std::pow(x, 2.0 * m - 1.0) * std::exp(-x);
}

bound_result cdf_lower_bound_uncorrelated(double s_th,
                                          const correlation::array_geometry& geometry,
                                          const correlation::channel_params& params, double b) {
  correlation::validate(geometry);
  bound_result out;
  out.threshold = s_th;
  out.fixed_cdf_term = cdf_snr_fixed_uncorrelated(s_th, geometry.m, params);
  out.lcr_term = lcr_uncorrelated(s_th, geometry.m, params, b);
  out.lower_bound_raw = out.fixed_cdf_term - geometry.span * out.lcr_term;
  out.lower_bound_clamped = std::max(0.0, out.lower_bound_raw);
  return out;
}

double cdf_snr_fixed_correlated(double s_th, const sigma_eigen& eig,
                                const correlation::channel_params& params) {
  correlation::validate(params);
  if (!std::isfinite(s_th)) throw std::domain_error("cdf_snr_fixed_correlated: s_th not finite");
  if (eig.rank == 0 || eig.lambda.n_elem == 0) {
    throw std::invalid_argument("cdf_snr_fixed_correlated: empty eigensystem");
  }
  if (s_th <= 0.0) return 0.0;
  const double gbar = params.mean_branch_snr();
  const arma::vec lam = eig.lambda.head(eig.rank);
  const double lmax = lam(0);

  // lambda is descending, so the smallest pairwise gap is between neighbours.
  bool degenerate = false;
  for (unsigned i = 1; i < eig.rank; ++i) {
    if (lam(i - 1) - lam(i) < kDegeneracyRel * lmax) degenerate = true;
  }

  double cdf;
  if (!degenerate) {
    double sum = 0.0;
    for (unsigned i = 0; i < eig.rank; ++i) {
      double pi_i = 1.0;
      for (unsigned j = 0; j < eig.rank; ++j) {
        if (j != i) pi_i *= 1.0 - lam(j) / lam(i);
      }
      sum += std::exp(-s_th / (lam(i) * gbar)) / pi_i;
    }
    cdf = 1.0 - sum;
  } else {
    // Phase-type fallback: the sum of independent exponentials with rates
    // 1 / (lambda_i gbar) is the absorption time of a pure-birth chain;
    // survival = e_1^T exp(s T) 1. Exact for confluent spectra.
    const unsigned r = eig.rank;
    arma::mat tgen(r, r, arma::fill::zeros);
    for (unsigned i = 0; i < r; ++i) {
      const double rate = 1.0 / (lam(i) * gbar);
      tgen(i, i) = -rate;
      if (i + 1 < r) tgen(i, i + 1) = rate;
    }
    const arma::mat e = arma::expmat(s_th * tgen);
    cdf = 1.0 - arma::accu(e.row(0));
  }
  return std::min(1.0, std::max(0.0, cdf));
}

lcr_context build_lcr_context(const correlation::array_geometry& geometry,
                              const correlation::channel_params& params) {
  correlation::validate(geometry);
  correlation::validate(params);
  lcr_context ctx;
  ctx.geometry = geometry;
  ctx.params = params;
  ctx.m = geometry.m;
  ctx.mean_snr = params.mean_branch_snr();
  ctx.sigma = correlation::build_sigma(geometry);
  ctx.b = correlation::build_b_matrix(geometry);

  const arma::mat sig_half = numerics::psd_sqrt(ctx.sigma);
  arma::mat q = 4.0 * ctx.mean_snr * ctx.mean_snr * sig_half * ctx.b * sig_half;
  q = 0.5 * (q + q.t());

  numerics::eig_sym_result qe = numerics::hermitian_eig(q);
  const double qmax = qe.values(0);
  const double qmin = qe.values(qe.values.n_elem - 1);
  if (!(qmin > 0.0) || qmax / qmin > 1e12) {
    throw singular_context_error("build_lcr_context: q is numerically singular");
  }
  ctx.cond_q = qmax / qmin;
  const arma::mat v = arma::real(qe.vectors);
  ctx.q = q;
  ctx.q_inv = v * arma::diagmat(1.0 / qe.values) * v.t();
  ctx.q_inv = 0.5 * (ctx.q_inv + ctx.q_inv.t());
  const arma::mat q_inv_half = v * arma::diagmat(1.0 / arma::sqrt(qe.values)) * v.t();
  ctx.f = q_inv_half * ctx.sigma * q_inv_half;
  ctx.f = 0.5 * (ctx.f + ctx.f.t());
  ctx.det_q = arma::prod(qe.values);
  return ctx;
}

arma::cx_vec g_eigenvalues(const lcr_context& ctx, double t1) {
  if (!std::isfinite(t1)) throw std::domain_error("g_eigenvalues: t1 not finite");
  const arma::cx_mat gmat(ctx.q_inv, -t1 * ctx.f);
  arma::cx_vec vals = numerics::general_complex_eig(gmat);
  for (const auto& v : vals) {
    if (!(v.real() > 0.0)) {
      throw numerical_range_error("g_eigenvalues: eigenvalue left the right half-plane");
    }
  }
  return vals;
}

arma::cx_vec partial_fraction_coeffs(const arma::cx_vec& g) {
  const arma::uword n = g.n_elem;
  if (n == 0) throw std::invalid_argument("partial_fraction_coeffs: empty spectrum");
  double gmax = 0.0;
  for (const auto& v : g) gmax = std::max(gmax, std::abs(v));
  const double thresh = kCollisionRel * gmax;
  arma::cx_vec a(n);
  for (arma::uword i = 0; i < n; ++i) {
    std::complex<double> prod = 1.0;
    for (arma::uword k = 0; k < n; ++k) {
      if (k == i) continue;
      const std::complex<double> diff = g(k) - g(i);
      if (std::abs(diff) < thresh) {
        throw eigenvalue_collision_error("partial_fraction_coeffs: eigenvalue collision");
      }
      prod /= diff;
    }
    a(i) = prod;
  }
  return a;
}

namespace {

// sum_i a_i g_i^{-3/2} with a colliding pair merged into a second-order
// residue at the pair mean: B1 ghat^{-3/2} + B2 (3/2) ghat^{-5/2}, where
// B2 = prod_{k notin pair}(g_k - ghat)^{-1} and B1 = -B2 sum_{k notin pair}
// (g_k - ghat)^{-1}. Groups of three or more colliding eigenvalues are not
// supported.
std::complex<double> confluent_pole_sum(const arma::cx_vec& g) {
  const arma::uword n = g.n_elem;
  double gmax = 0.0;
  for (const auto& v : g) gmax = std::max(gmax, std::abs(v));
  const double thresh = kCollisionRel * gmax;

  // Cluster by the collision threshold (union-find over pairs).
  std::vector<arma::uword> parent(n);
  for (arma::uword i = 0; i < n; ++i) parent[i] = i;
  const auto find = [&parent](arma::uword x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };
  for (arma::uword i = 0; i < n; ++i) {
    for (arma::uword k = i + 1; k < n; ++k) {
      if (std::abs(g(k) - g(i)) < thresh) parent[find(k)] = find(i);
    }
  }
  std::vector<std::vector<arma::uword>> groups(n);
  for (arma::uword i = 0; i < n; ++i) groups[find(i)].push_back(i);

  std::complex<double> total = 0.0;
  for (const auto& members : groups) {
    if (members.empty()) continue;
    if (members.size() > 2) {
      throw eigenvalue_collision_error(
          "lcr_correlated: three or more eigenvalues collided at a quadrature node");
    }
    if (members.size() == 1) {
      const arma::uword i = members[0];
      std::complex<double> a_i = 1.0;
      for (arma::uword k = 0; k < n; ++k) {
        if (k != i) a_i /= g(k) - g(i);
      }
      total += a_i * std::pow(g(i), -1.5);
    } else {
      const std::complex<double> ghat = 0.5 * (g(members[0]) + g(members[1]));
      std::complex<double> b2 = 1.0;
      std::complex<double> ssum = 0.0;
      for (arma::uword k = 0; k < n; ++k) {
        if (k == members[0] || k == members[1]) continue;
        const std::complex<double> diff = g(k) - ghat;
        b2 /= diff;
        ssum += 1.0 / diff;
      }
      const std::complex<double> b1 = -b2 * ssum;
      total += b1 * std::pow(ghat, -1.5) + b2 * 1.5 * std::pow(ghat, -2.5);
    }
  }
  return total;
}

std::complex<double> pole_sum_at(const lcr_context& ctx, double t1) {
  for (int attempt = 0; attempt < 4; ++attempt) {
    const double tt = t1 + attempt * 1e-7 * (1.0 + std::abs(t1));
    const arma::cx_vec g = g_eigenvalues(ctx, tt);
    try {
      const arma::cx_vec a = partial_fraction_coeffs(g);
      std::complex<double> sum = 0.0;
      for (arma::uword i = 0; i < g.n_elem; ++i) sum += a(i) * std::pow(g(i), -1.5);
      return sum;
    } catch (const eigenvalue_collision_error&) {
      // retry at a perturbed node, then fall through to the confluent form
    }
  }
  return confluent_pole_sum(g_eigenvalues(ctx, t1));
}

}  // namespace

std::complex<double> joint_cf(const lcr_context& ctx, double t1, double t2) {
  if (!std::isfinite(t2)) throw std::domain_error("joint_cf: t2 not finite");
  const arma::cx_vec g = g_eigenvalues(ctx, t1);
  std::complex<double> denom = ctx.det_q;
  for (const auto& gi : g) denom *= gi - std::complex<double>(0.0, t2);
  return 1.0 / denom;
}

double lcr_correlated(double s_th, const lcr_context& ctx,
                      const numerics::quadrature_spec& spec) {
  if (!std::isfinite(s_th) || s_th < 0.0) {
    throw std::domain_error("lcr_correlated: s_th must be >= 0");
  }
  if (s_th == 0.0) return 0.0;

  // The inversion integral lives in the normalized threshold
  // s_th sigma^2 / (E_x beta); the change of variables back to SNR units
  // contributes the trailing 1/gbar.
  const double level = s_th / ctx.mean_snr;
  const auto integrand = [&ctx, level](double t1) {
    return pole_sum_at(ctx, t1) * std::exp(std::complex<double>(0.0, -t1 * level));
  };

  const double prefactor =
      1.0 / (4.0 * std::sqrt(2.0) * kPi * ctx.det_q * ctx.mean_snr);
  // The caller's tolerances describe the returned rate. The raw transform is
  // larger by 1/prefactor, so the absolute target is rescaled before
  // integrating (relative accuracy is scale-free and carries over as is).
  // Without this, small-m configurations at high thresholds would chase the
  // oscillatory t^(-m-1/2) tail far past any reasonable panel budget to win
  // absolute digits the rate does not need.
  numerics::quadrature_spec scaled = spec;
  scaled.abs_tol = spec.abs_tol / prefactor;
  // the e^{-j t1 level} factor sets the asymptotic oscillation, which lets
  // the integrator extrapolate the slowly decaying tail instead of walking it
  if (scaled.oscillation_period <= 0.0) {
    scaled.oscillation_period = 2.0 * kPi / level;
  }
  // Every integrand evaluation diagonalizes q^{-1} - j t1 f, so its values
  // carry relative noise of about eps * cond(q). Tightly spaced arrays push
  // cond(q) past 1e9 and no quadrature target below that noise is
  // certifiable; the tolerances are floored at what the spectrum supports
  // (the absolute floor spans the peak magnitude times the effective
  // integration width) and the integrator is told to stop refining panels
  // whose error estimate is pure evaluation noise.
  const double eval_noise =
      std::numeric_limits<double>::epsilon() * ctx.cond_q;
  scaled.noise_floor_rel = eval_noise;
  const double peak = std::abs(pole_sum_at(ctx, 0.0));
  scaled.abs_tol = std::max(scaled.abs_tol, kEvalNoiseWidthFactor * eval_noise * peak);
  scaled.rel_tol = std::max(scaled.rel_tol, kEvalNoiseRelFactor * eval_noise);
  const numerics::integral_result res = numerics::integrate_real_line(integrand, scaled, true);
  const double value = prefactor * res.value.real();
  if (value < -std::max(spec.abs_tol, 1e-12)) {
    throw std::runtime_error("lcr_correlated: integral produced a significantly negative rate");
  }
  return std::max(0.0, value);
}

bound_result cdf_lower_bound_correlated(double s_th,
                                        const correlation::array_geometry& geometry,
                                        const correlation::channel_params& params,
                                        const numerics::quadrature_spec& spec) {
  correlation::validate(geometry);
  correlation::validate(params);
  if (!std::isfinite(s_th) || s_th < 0.0) {
    throw std::domain_error("cdf_lower_bound_correlated: s_th must be >= 0");
  }
  const sigma_eigen eig = decompose_sigma(correlation::build_sigma(geometry));
  bound_result out;
  out.threshold = s_th;
  out.fixed_cdf_term = cdf_snr_fixed_correlated(s_th, eig, params);
  out.lcr_term = 0.0;
  if (geometry.span > 0.0 && s_th > 0.0) {
    const lcr_context ctx = build_lcr_context(geometry, params);
    out.lcr_term = lcr_correlated(s_th, ctx, spec);
  }
  out.lower_bound_raw = out.fixed_cdf_term - geometry.span * out.lcr_term;
  out.lower_bound_clamped = std::max(0.0, out.lower_bound_raw);
  return out;
}

}  // namespace maa::analytic
