// SPDX-License-Identifier: Apache-2.0
// Copyright (c) 2026 maa contributors

#include "maa/simulate.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <stdexcept>
#include <thread>
#include <vector>

#include "maa/errors.hpp"

namespace maa::simulate {

// ---------------------------------------------------------------------------
// Counter-based generator (Philox-4x64, 10 rounds)
// ---------------------------------------------------------------------------

namespace {

constexpr std::uint64_t kPhiloxM0 = 0xD2E7470EE14C6C93ULL;
constexpr std::uint64_t kPhiloxM1 = 0xCA5A826395121157ULL;
constexpr std::uint64_t kWeyl0 = 0x9E3779B97F4A7C15ULL;
constexpr std::uint64_t kWeyl1 = 0xBB67AE8584CAA73BULL;

inline std::uint64_t mulhilo(std::uint64_t a, std::uint64_t b, std::uint64_t& hi) {
  const unsigned __int128 p = static_cast<unsigned __int128>(a) * b;
  hi = static_cast<std::uint64_t>(p >> 64);
  return static_cast<std::uint64_t>(p);
}

inline void philox_round(std::array<std::uint64_t, 4>& x, const std::array<std::uint64_t, 2>& k) {
  std::uint64_t hi0, hi1;
  const std::uint64_t lo0 = mulhilo(kPhiloxM0, x[0], hi0);
  const std::uint64_t lo1 = mulhilo(kPhiloxM1, x[2], hi1);
  x = {hi1 ^ x[1] ^ k[0], lo1, hi0 ^ x[3] ^ k[1], lo0};
}

inline std::array<std::uint64_t, 4> philox_block(std::array<std::uint64_t, 4> ctr,
                                                 std::array<std::uint64_t, 2> key) {
  philox_round(ctr, key);
  for (int r = 1; r < 10; ++r) {
    key[0] += kWeyl0;
    key[1] += kWeyl1;
    philox_round(ctr, key);
  }
  return ctr;
}

}  // namespace

std::array<std::uint64_t, 4> philox4x64_block(const std::array<std::uint64_t, 4>& counter,
                                              const std::array<std::uint64_t, 2>& key) {
  return philox_block(counter, key);
}

philox_stream::philox_stream(std::uint64_t seed, std::uint64_t stream)
    : key_{seed, stream} {}

void philox_stream::refill() {
  // The 256-bit counter advances BEFORE each block (low word first, with
  // carry), matching the convention of the widely used Python bit
  // generator for this algorithm so streams are reproducible externally:
  // block n of key (seed, stream) is philox4x64_block(counter = n + 1).
  for (int w = 0; w < 4; ++w) {
    if (++counter_[w] != 0) break;
  }
  buffer_ = philox_block(counter_, key_);
  buffer_pos_ = 0;
}

std::uint64_t philox_stream::next_u64() {
  if (buffer_pos_ >= 4) refill();
  return buffer_[buffer_pos_++];
}

double philox_stream::next_uniform() {
  return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

double philox_stream::next_normal() {
  if (has_cached_normal_) {
    has_cached_normal_ = false;
    return cached_normal_;
  }
  // Box-Muller; 1 - u keeps the log argument in (0, 1].
  const double u1 = 1.0 - next_uniform();
  const double u2 = next_uniform();
  const double radius = std::sqrt(-2.0 * std::log(u1));
  const double angle = 6.283185307179586476925286766559 * u2;
  cached_normal_ = radius * std::sin(angle);
  has_cached_normal_ = true;
  return radius * std::cos(angle);
}

std::complex<double> philox_stream::next_cn() {
  constexpr double kHalfSqrt2 = 0.70710678118654752440084436210485;
  const double re = next_normal();
  const double im = next_normal();
  return {re * kHalfSqrt2, im * kHalfSqrt2};
}

// ---------------------------------------------------------------------------
// Covariance factorization
// ---------------------------------------------------------------------------

namespace {

// Internal sketch seed: fixed so the factorization (and therefore every
// simulated trajectory) is independent of the user's seed choice.
constexpr std::uint64_t kSketchSeed = 0x6d61612d736b7463ULL;

constexpr double kResidualContractRel = 1e-6;  // published contract
constexpr double kResidualTargetRel = 1e-8;    // internal acceptance target
constexpr double kEigenDropRel = 1e-12;

void fill_standard_normal(arma::mat& a, philox_stream& rng) {
  for (arma::uword j = 0; j < a.n_cols; ++j) {
    for (arma::uword i = 0; i < a.n_rows; ++i) {
      a(i, j) = rng.next_normal();
    }
  }
}

// Range-finder + Rayleigh-Ritz eigensolver for a symmetric matrix of low
// numerical rank. The Frobenius residual of the rank-q approximation is
// exact: ||c - q_basis b q_basis^T||_F^2 = ||c||_F^2 - ||b||_F^2 when
// b = q_basis^T c q_basis.
// Sketch-based eigendecomposition. Succeeds only when the captured spectrum
// has visibly saturated: the trailing eigenvalues must already be negligible
// several slots before the sketch width, otherwise the sketch may have
// missed part of the range and the caller should retry wider. (Estimating
// the residual as fro^2 minus the captured energy is useless here: it
// cancels catastrophically long before the target is reached.)
bool randomized_eig(const arma::mat& c, arma::uword q, arma::vec& vals, arma::mat& vecs) {
  const arma::uword n = c.n_rows;
  philox_stream rng(kSketchSeed, q);
  arma::mat omega(n, q);
  fill_standard_normal(omega, rng);

  arma::mat basis, rwork;
  if (!arma::qr_econ(basis, rwork, c * omega)) return false;
  if (!arma::qr_econ(basis, rwork, c * basis)) return false;  // one power step

  arma::mat small = basis.t() * (c * basis);
  small = 0.5 * (small + small.t());

  arma::vec small_vals;
  arma::mat small_vecs;
  if (!arma::eig_sym(small_vals, small_vecs, small, "dc")) return false;
  vals = arma::reverse(small_vals);
  vecs = basis * arma::fliplr(small_vecs);

  const double lmax = vals(0);
  if (!(lmax > 0.0)) return false;
  constexpr arma::uword kRankMargin = 8;
  const arma::uword significant = arma::accu(vals > kEigenDropRel * lmax);
  return significant + kRankMargin <= q;
}

// Unbiased stochastic estimate of ||c - l l^T||_F: for a standard normal
// probe w, E ||(c - l l^T) w||^2 equals the squared Frobenius norm. Direct
// evaluation of the probe residual is numerically benign, unlike forming
// the norm difference.
double stochastic_fro_residual(const arma::mat& c, const arma::mat& l) {
  constexpr int kProbes = 8;
  philox_stream rng(kSketchSeed ^ 0x70726f6265ULL, c.n_rows);
  arma::vec w(c.n_rows);
  double r2 = 0.0;
  for (int p = 0; p < kProbes; ++p) {
    for (arma::uword i = 0; i < w.n_elem; ++i) w(i) = rng.next_normal();
    const arma::vec e = c * w - l * (l.t() * w);
    r2 += arma::dot(e, e);
  }
  return std::sqrt(r2 / kProbes);
}

}  // namespace

covariance_factor factorize_grid_covariance(const arma::mat& c) {
  if (!c.is_square()) throw std::invalid_argument("factorize_grid_covariance: not square");
  if (!c.is_finite()) throw std::domain_error("factorize_grid_covariance: non-finite entries");
  const arma::uword n = c.n_rows;
  const double scale = std::max(1.0, arma::abs(c).max());
  if (arma::abs(c - c.t()).max() > 1e-10 * scale) {
    throw std::domain_error("factorize_grid_covariance: not symmetric");
  }

  const double fro = arma::norm(c, "fro");
  const double tr = arma::trace(c);

  arma::vec vals;
  arma::mat vecs;
  bool randomized = false;

  if (n > 512) {
    for (arma::uword q = 128; q < n; q *= 2) {
      if (randomized_eig(c, std::min(q, n), vals, vecs)) {
        randomized = true;
        break;
      }
    }
  }
  if (!randomized) {
    // Dense path: small matrices, or the sketch failed to capture the range
    // (high-rank input).
    arma::vec dvals;
    arma::mat dvecs;
    if (!arma::eig_sym(dvals, dvecs, 0.5 * (c + c.t()), "dc")) {
      throw std::runtime_error("factorize_grid_covariance: eigendecomposition failed");
    }
    vals = arma::reverse(dvals);
    vecs = arma::fliplr(dvecs);
  }

  double clipped_mass = 0.0;
  for (arma::uword i = 0; i < vals.n_elem; ++i) {
    if (vals(i) < 0.0) clipped_mass -= vals(i);
  }
  if (clipped_mass > 1e-3 * tr) {
    throw not_psd_error("factorize_grid_covariance: clipped eigenvalue mass exceeds 1e-3 trace");
  }

  const double lmax = vals.n_elem ? vals(0) : 0.0;
  if (!(lmax > 0.0)) {
    throw not_psd_error("factorize_grid_covariance: no positive eigenvalue");
  }
  arma::uvec keep = arma::find(vals > kEigenDropRel * lmax);

  double dropped2 = 0.0;
  for (arma::uword i = 0; i < vals.n_elem; ++i) {
    if (!(vals(i) > kEigenDropRel * lmax)) dropped2 += vals(i) * vals(i);
  }

  covariance_factor out;
  out.n = n;
  out.spectrum = vals(keep);
  out.l = vecs.cols(keep) * arma::diagmat(arma::sqrt(out.spectrum));
  out.clipped_mass = clipped_mass;
  // dense results are exact up to the dropped tail; sketched results get a
  // direct stochastic measurement of what the delivered factor reproduces
  out.fro_residual =
      randomized ? stochastic_fro_residual(c, out.l) : std::sqrt(dropped2);
  if (out.fro_residual > kResidualContractRel * fro) {
    throw std::runtime_error("factorize_grid_covariance: reconstruction residual above contract");
  }
  return out;
}

// ---------------------------------------------------------------------------
// Field sampling
// ---------------------------------------------------------------------------

void validate(const sim_config& cfg, const correlation::array_geometry& g) {
  if (cfg.realizations == 0) throw std::invalid_argument("sim_config: realizations must be >= 1");
  if (cfg.grid_points == 0) throw std::invalid_argument("sim_config: grid_points must be >= 1");
  if (g.span > 0.0 && cfg.grid_points < 2) {
    throw std::invalid_argument("sim_config: grid_points must be >= 2 when span > 0");
  }
}

field_realization sample_field(const covariance_factor& factor,
                               const correlation::array_geometry& g, const arma::vec& grid,
                               const correlation::channel_params& params, philox_stream& rng) {
  correlation::validate(g);
  correlation::validate(params);
  const arma::uword n_pos = grid.n_elem;
  if (factor.n != static_cast<std::size_t>(g.m) * n_pos) {
    throw std::invalid_argument("sample_field: factor size does not match geometry and grid");
  }
  const arma::uword rank = factor.l.n_cols;
  arma::vec zre(rank), zim(rank);
  for (arma::uword i = 0; i < rank; ++i) {
    const std::complex<double> z = rng.next_cn();
    zre(i) = z.real();
    zim(i) = z.imag();
  }
  const arma::vec xre = factor.l * zre;
  const arma::vec xim = factor.l * zim;

  const double sqrt_beta = std::sqrt(params.beta);
  const double gbar = params.mean_branch_snr();

  field_realization out;
  out.positions = grid;
  out.h.set_size(g.m, n_pos);
  out.snr.set_size(n_pos);
  for (arma::uword k = 0; k < n_pos; ++k) {
    double acc = 0.0;
    for (unsigned i = 0; i < g.m; ++i) {
      const arma::uword idx = k * g.m + i;
      out.h(i, k) = std::complex<double>(sqrt_beta * xre(idx), sqrt_beta * xim(idx));
      acc += xre(idx) * xre(idx) + xim(idx) * xim(idx);
    }
    out.snr(k) = gbar * acc;
  }
  return out;
}

std::size_t count_upcrossings(const arma::vec& snr, double s_th) {
  std::size_t count = 0;
  for (arma::uword k = 0; k + 1 < snr.n_elem; ++k) {
    if (snr(k) <= s_th && s_th < snr(k + 1)) ++count;
  }
  return count;
}

// ---------------------------------------------------------------------------
// Full process simulation
// ---------------------------------------------------------------------------

namespace {

unsigned resolve_threads(unsigned requested) {
  if (requested > 0) return std::min(requested, 64u);
  if (const char* env = std::getenv("MAA_THREADS")) {
    char* end = nullptr;
    const unsigned long v = std::strtoul(env, &end, 10);
    if (end != env && *end == '\0' && v >= 1 && v <= 64) return static_cast<unsigned>(v);
  }
  return 1;
}

constexpr std::size_t kBatchWidth = 512;  // fixed: keeps results thread-count invariant
constexpr std::size_t kDumpCellLimit = std::size_t{1} << 26;

}  // namespace

empirical_stats simulate_process(const correlation::array_geometry& g,
                                 const correlation::channel_params& params,
                                 const sim_config& cfg, const arma::vec& thresholds,
                                 const std::string& trace_dump_path) {
  correlation::validate(g);
  correlation::validate(params);
  validate(cfg, g);
  const std::size_t n_th = thresholds.n_elem;
  if (n_th == 0) throw std::invalid_argument("simulate_process: empty threshold list");
  if (!thresholds.is_finite()) throw std::domain_error("simulate_process: non-finite threshold");
  for (std::size_t j = 1; j < n_th; ++j) {
    if (!(thresholds(j) > thresholds(j - 1))) {
      throw std::invalid_argument("simulate_process: thresholds must be strictly increasing");
    }
  }

  const arma::vec grid = correlation::position_grid(g.span, cfg.grid_points);
  const std::size_t n_pos = grid.n_elem;
  const std::size_t m = g.m;
  const std::size_t n_real = cfg.realizations;

  const bool want_dump = !trace_dump_path.empty();
  if (want_dump && n_real * n_pos > kDumpCellLimit) {
    throw std::invalid_argument("simulate_process: trace dump too large; reduce realizations");
  }

  covariance_factor factor;
  {
    const arma::mat c = correlation::grid_covariance(g, grid);
    factor = factorize_grid_covariance(c);
  }
  const arma::uword rank = factor.l.n_cols;
  const double gbar = params.mean_branch_snr();

  empirical_stats st;
  st.thresholds = thresholds;
  st.span = g.span;
  st.realizations = n_real;
  st.sup_samples.set_size(n_real);
  st.crossing_counts.zeros(n_th, n_real);
  arma::vec pos_var(n_real, arma::fill::zeros);

  const std::size_t n_batches = (n_real + kBatchWidth - 1) / kBatchWidth;
  arma::mat pos_sum(n_pos, n_batches, arma::fill::zeros);
  arma::mat traces;
  if (want_dump) traces.set_size(n_pos, n_real);

  const double* th = thresholds.memptr();

  auto process_batch = [&](std::size_t b) {
    const std::size_t r0 = b * kBatchWidth;
    const std::size_t width = std::min(kBatchWidth, n_real - r0);
    arma::mat zre(rank, width), zim(rank, width);
    for (std::size_t j = 0; j < width; ++j) {
      philox_stream rng(cfg.seed, r0 + j);
      for (arma::uword i = 0; i < rank; ++i) {
        const std::complex<double> z = rng.next_cn();
        zre(i, j) = z.real();
        zim(i, j) = z.imag();
      }
    }
    const arma::mat xre = factor.l * zre;
    const arma::mat xim = factor.l * zim;

    arma::vec snr(n_pos);
    for (std::size_t j = 0; j < width; ++j) {
      const std::size_t r = r0 + j;
      const double* cre = xre.colptr(j);
      const double* cim = xim.colptr(j);
      for (std::size_t k = 0; k < n_pos; ++k) {
        double acc = 0.0;
        for (std::size_t i = 0; i < m; ++i) {
          const std::size_t idx = k * m + i;
          acc += cre[idx] * cre[idx] + cim[idx] * cim[idx];
        }
        snr(k) = gbar * acc;
      }

      st.sup_samples(r) = snr.max();

      double rise = 0.0;
      arma::uword* counts = st.crossing_counts.colptr(r);
      for (std::size_t k = 0; k + 1 < n_pos; ++k) {
        const double lo = snr(k);
        const double hi = snr(k + 1);
        if (hi > lo) {
          rise += hi - lo;
          // thresholds t with lo <= t < hi get one up-crossing each
          const double* first = std::lower_bound(th, th + n_th, lo);
          const double* last = std::lower_bound(th, th + n_th, hi);
          for (const double* p = first; p != last; ++p) ++counts[p - th];
        }
      }
      pos_var(r) = rise;
      pos_sum.col(b) += snr;
      if (want_dump) traces.col(r) = snr;
    }
  };

  const unsigned n_threads = std::min<std::size_t>(resolve_threads(cfg.threads), n_batches);
  if (n_threads <= 1) {
    for (std::size_t b = 0; b < n_batches; ++b) process_batch(b);
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    pool.reserve(n_threads);
    for (unsigned t = 0; t < n_threads; ++t) {
      pool.emplace_back([&]() {
        for (std::size_t b = next.fetch_add(1); b < n_batches; b = next.fetch_add(1)) {
          process_batch(b);
        }
      });
    }
    for (auto& t : pool) t.join();
  }

  // Order-fixed reductions (independent of which thread ran which batch).
  st.position_mean = arma::sum(pos_sum, 1) / static_cast<double>(n_real);
  st.mean_positive_variation =
      g.span > 0.0 ? arma::mean(pos_var) / g.span : 0.0;

  if (want_dump) {
    std::ofstream out(trace_dump_path);
    if (!out) throw std::runtime_error("simulate_process: cannot open trace dump path");
    char buf[32];
    for (std::size_t r = 0; r < n_real; ++r) {
      for (std::size_t k = 0; k < n_pos; ++k) {
        std::snprintf(buf, sizeof buf, "%.9g", traces(k, r));
        if (k) out << ',';
        out << buf;
      }
      out << '\n';
    }
  }
  return st;
}

// ---------------------------------------------------------------------------
// Estimators
// ---------------------------------------------------------------------------

rate_estimate empirical_lcr(const empirical_stats& stats, std::size_t threshold_index) {
  if (threshold_index >= stats.thresholds.n_elem) {
    throw std::out_of_range("empirical_lcr: threshold index out of range");
  }
  if (!(stats.span > 0.0)) throw std::domain_error("empirical_lcr: span must be > 0");
  const std::size_t r = stats.realizations;
  if (r < 2) throw std::invalid_argument("empirical_lcr: needs at least 2 realizations");
  double sum = 0.0;
  for (std::size_t i = 0; i < r; ++i) {
    sum += static_cast<double>(stats.crossing_counts(threshold_index, i));
  }
  const double mean = sum / static_cast<double>(r);
  double ss = 0.0;
  for (std::size_t i = 0; i < r; ++i) {
    const double d = static_cast<double>(stats.crossing_counts(threshold_index, i)) - mean;
    ss += d * d;
  }
  const double sd = std::sqrt(ss / static_cast<double>(r - 1));
  rate_estimate out;
  out.rate = mean / stats.span;
  out.std_err = sd / (stats.span * std::sqrt(static_cast<double>(r)));
  return out;
}

proportion empirical_sup_cdf(const empirical_stats& stats, std::size_t threshold_index) {
  if (threshold_index >= stats.thresholds.n_elem) {
    throw std::out_of_range("empirical_sup_cdf: threshold index out of range");
  }
  const std::size_t n = stats.realizations;
  if (n == 0) throw std::invalid_argument("empirical_sup_cdf: no realizations");
  const double th = stats.thresholds(threshold_index);
  std::size_t k = 0;
  for (std::size_t i = 0; i < n; ++i) {
    if (stats.sup_samples(i) <= th) ++k;
  }
  const double z = 1.959963984540054;  // 97.5% normal quantile
  const double nn = static_cast<double>(n);
  const double phat = static_cast<double>(k) / nn;
  const double denom = 1.0 + z * z / nn;
  const double center = (phat + z * z / (2.0 * nn)) / denom;
  const double half =
      z * std::sqrt(phat * (1.0 - phat) / nn + z * z / (4.0 * nn * nn)) / denom;
  proportion out;
  out.fraction = phat;
  out.ci_low = std::max(0.0, center - half);
  out.ci_high = std::min(1.0, center + half);
  return out;
}

namespace {

// v^H a v for real symmetric a and complex v (the imaginary part vanishes).
double quad_form(const arma::mat& a, const arma::cx_vec& v) {
  const arma::uword n = v.n_elem;
  double acc = 0.0;
  for (arma::uword i = 0; i < n; ++i) {
    acc += a(i, i) * std::norm(v(i));
    for (arma::uword j = i + 1; j < n; ++j) {
      acc += 2.0 * a(i, j) * (v(i).real() * v(j).real() + v(i).imag() * v(j).imag());
    }
  }
  return acc;
}

}  // namespace

mc_cf_estimate mc_joint_cf(const analytic::lcr_context& ctx, double t1, double t2,
                           std::size_t samples, std::uint64_t seed) {
  if (samples < 2) throw std::invalid_argument("mc_joint_cf: samples must be >= 2");
  philox_stream rng(seed, 0);
  const arma::uword m = ctx.m;
  arma::cx_vec v(m);
  double sum_re = 0.0, sum_im = 0.0, sumsq_re = 0.0, sumsq_im = 0.0;
  for (std::size_t it = 0; it < samples; ++it) {
    for (arma::uword i = 0; i < m; ++i) v(i) = rng.next_cn();
    const double s = quad_form(ctx.sigma, v);
    const double p = quad_form(ctx.q, v);
    const double phase = t1 * s + t2 * p;
    const double re = std::cos(phase);
    const double im = std::sin(phase);
    sum_re += re;
    sum_im += im;
    sumsq_re += re * re;
    sumsq_im += im * im;
  }
  const double n = static_cast<double>(samples);
  const double mean_re = sum_re / n;
  const double mean_im = sum_im / n;
  const double var_re = std::max(0.0, (sumsq_re - n * mean_re * mean_re) / (n - 1.0));
  const double var_im = std::max(0.0, (sumsq_im - n * mean_im * mean_im) / (n - 1.0));
  mc_cf_estimate out;
  out.value = {mean_re, mean_im};
  out.std_err = std::sqrt((var_re + var_im) / n);
  return out;
}

mc_estimate mc_sdot_variance(const analytic::lcr_context& ctx, std::size_t samples,
                             std::uint64_t seed) {
  if (samples < 2) throw std::invalid_argument("mc_sdot_variance: samples must be >= 2");
  const arma::mat sig_half = numerics::psd_sqrt(ctx.sigma);
  philox_stream rng(seed, 0);
  const arma::uword m = ctx.m;
  const double gbar = ctx.mean_snr;
  const double scale = 4.0 * gbar * gbar * ctx.params.beta;
  arma::cx_vec z(m);
  double sum = 0.0, sumsq = 0.0;
  for (std::size_t it = 0; it < samples; ++it) {
    for (arma::uword i = 0; i < m; ++i) z(i) = rng.next_cn();
    const arma::cx_vec h = sig_half * z;  // unit-power field; beta enters via scale
    const double x = scale * quad_form(ctx.b, h);
    sum += x;
    sumsq += x * x;
  }
  const double n = static_cast<double>(samples);
  const double mean = sum / n;
  const double var = std::max(0.0, (sumsq - n * mean * mean) / (n - 1.0));
  mc_estimate out;
  out.value = mean;
  out.std_err = std::sqrt(var / n);
  return out;
}

}  // namespace maa::simulate
