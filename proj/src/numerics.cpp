// SPDX-License-Identifier: Apache-2.0
// Copyright (c) 2026 maa contributors

#include "maa/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <queue>
#include <vector>

namespace maa::numerics {

namespace {

constexpr long double kPi_l = 3.14159265358979323846264338327950288L;

// Crossover between the power series and the Hankel asymptotic expansion.
// The asymptotic series bottoms out near 1e-13 at x ~ 17; the series in
// 80-bit arithmetic holds ~4e-14 up to there, so both sides meet the
// 1e-12 budget at the seam.
constexpr double kBesselSeriesCutoff = 17.5;

long double bessel_series(int nu, long double x) {
  // J0 = sum (-q)^k / (k!)^2, J1 = (x/2) * sum (-q)^k / (k! (k+1)!), q = x^2/4.
  const long double q = x * x / 4.0L;
  long double term = 1.0L;
  long double sum = 1.0L;
  for (int k = 1; k <= 90; ++k) {
    term *= -q / (static_cast<long double>(k) * (k + nu));
    sum += term;
    if (std::abs(term) < 1e-25L * std::abs(sum) + 1e-30L) break;
  }
  return nu == 0 ? sum : sum * x / 2.0L;
}

long double bessel_asymptotic(int nu, long double x) {
  // Hankel expansion: J_nu(x) = sqrt(2/(pi x)) (P cos(chi) - Q sin(chi)),
  // chi = x - (2 nu + 1) pi / 4, with P, Q the usual series in 1/(8x).
  const long double mu = 4.0L * nu * nu;
  const long double ex = 8.0L * x;
  long double t = 1.0L;
  long double p = 1.0L;
  long double q = 0.0L;
  for (int k = 1; k <= 18; ++k) {
    const long double odd = 2.0L * k - 1.0L;
    t *= (mu - odd * odd) / (static_cast<long double>(k) * ex);
    if (k % 2 == 1) {
      q += ((k / 2) % 2 == 0) ? t : -t;
    } else {
      p += ((k / 2) % 2 == 1) ? -t : t;
    }
  }
  const long double chi = x - (2 * nu + 1) * kPi_l / 4.0L;
  return std::sqrt(2.0L / (kPi_l * x)) * (p * std::cos(chi) - q * std::sin(chi));
}

double bessel_j(int nu, double x) {
  if (!std::isfinite(x)) throw std::domain_error("bessel: non-finite argument");
  const double ax = std::abs(x);
  long double v;
  if (ax <= kBesselSeriesCutoff) {
    v = bessel_series(nu, static_cast<long double>(ax));
  } else {
    v = bessel_asymptotic(nu, static_cast<long double>(ax));
  }
  if (nu == 1 && x < 0) v = -v;  // J1 odd, J0 even
  return static_cast<double>(v);
}

}  // namespace

double bessel_j0(double x) { return bessel_j(0, x); }

double bessel_j1(double x) { return bessel_j(1, x); }

double regularized_lower_gamma(unsigned m, double x) {
  if (m == 0) throw std::invalid_argument("regularized_lower_gamma: order must be >= 1");
  if (!std::isfinite(x)) {
    throw std::domain_error("regularized_lower_gamma: x must be finite");
  }
  // CDF semantics: the distribution has no mass below zero
  if (x <= 0.0) return 0.0;
  const long double xl = x;
  if (xl < m + 1.0L) {
    // Lower series around x = 0: P = x^m e^-x / m! * sum_j x^j / prod(m+1..m+j).
    long double term = 1.0L;
    long double sum = 1.0L;
    for (unsigned j = 1; j <= 10000; ++j) {
      term *= xl / (m + j);
      sum += term;
      if (term < 1e-25L * sum) break;
    }
    const long double lead =
        std::exp(m * std::log(xl) - xl - std::lgamma(static_cast<long double>(m) + 1.0L));
    return static_cast<double>(lead * sum);
  }
  // Complement as a finite Poisson sum: Q(m, x) = e^-x sum_{k<m} x^k / k!.
  long double term = 1.0L;
  long double sum = 1.0L;
  for (unsigned k = 1; k < m; ++k) {
    term *= xl / k;
    sum += term;
  }
  const long double qv = std::exp(-xl) * sum;
  return static_cast<double>(1.0L - qv);
}

namespace {

// 15-point Kronrod / 7-point Gauss pair (QUADPACK dqk15 abscissae/weights).
constexpr double kXgk[8] = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144838258730, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.0};
constexpr double kWgk[8] = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
constexpr double kWg[4] = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

struct panel {
  double a = 0.0, b = 0.0;
  std::complex<double> value{};
  double err = 0.0;
  double floor = 0.0;  ///< noise/rounding limit; err == floor means unimprovable
};

using inner_integrand = std::function<std::complex<double>(double)>;

panel eval_panel(const inner_integrand& f, double a, double b, double noise_rel) {
  const double c = 0.5 * (a + b);
  const double h = 0.5 * (b - a);
  std::complex<double> fv[15];
  fv[7] = f(c);
  for (int i = 0; i < 7; ++i) {
    fv[i] = f(c - h * kXgk[i]);
    fv[14 - i] = f(c + h * kXgk[i]);
  }
  std::complex<double> resk = kWgk[7] * fv[7];
  double resabs = kWgk[7] * std::abs(fv[7]);
  for (int i = 0; i < 7; ++i) {
    resk += kWgk[i] * (fv[i] + fv[14 - i]);
    resabs += kWgk[i] * (std::abs(fv[i]) + std::abs(fv[14 - i]));
  }
  std::complex<double> resg = kWg[3] * fv[7];
  for (int i = 0; i < 3; ++i) {
    resg += kWg[i] * (fv[2 * i + 1] + fv[13 - 2 * i]);
  }
  const std::complex<double> mean = resk * 0.5;
  double resasc = kWgk[7] * std::abs(fv[7] - mean);
  for (int i = 0; i < 7; ++i) {
    resasc += kWgk[i] * (std::abs(fv[i] - mean) + std::abs(fv[14 - i] - mean));
  }
  resasc *= h;
  resabs *= h;
  double err = std::abs(resk - resg) * h;
  if (resasc != 0.0 && err != 0.0) {
    err = resasc * std::min(1.0, std::pow(200.0 * err / resasc, 1.5));
  }
  const double floor =
      std::max(50.0 * std::numeric_limits<double>::epsilon(), noise_rel) * resabs;
  err = std::max(err, floor);
  return {a, b, resk * h, err, floor};
}

bool at_floor(const panel& p) { return p.err <= p.floor * (1.0 + 1e-9); }

struct worst_first {
  bool operator()(const panel& lhs, const panel& rhs) const {
    if (lhs.err != rhs.err) return lhs.err < rhs.err;
    return lhs.a > rhs.a;  // deterministic tie-break
  }
};

// Wynn's epsilon algorithm over a stream of partial sums. Feeding S_n
// returns the best current even-column extrapolant of the sequence limit.
// Only the newest antidiagonal of the epsilon table is kept.
class wynn_epsilon {
 public:
  std::complex<double> push(std::complex<double> s_n) {
    std::vector<std::complex<double>> next(diag_.size() + 1);
    next[0] = s_n;
    std::size_t filled = next.size();
    for (std::size_t k = 1; k < next.size(); ++k) {
      const std::complex<double> denom = next[k - 1] - diag_[k - 1];
      if (std::abs(denom) < 1e-300) {
        filled = k;  // converged column; deeper entries would overflow
        break;
      }
      const std::complex<double> low = (k >= 2) ? diag_[k - 2] : std::complex<double>{};
      next[k] = low + 1.0 / denom;
    }
    next.resize(filled);
    diag_ = std::move(next);
    std::size_t k = diag_.size() - 1;
    if (k % 2 == 1) --k;  // odd columns are auxiliary, not estimates
    return diag_[k];
  }

 private:
  std::vector<std::complex<double>> diag_;
};

}  // namespace

integral_result integrate_real_line(const real_line_integrand& f, const quadrature_spec& spec,
                                    bool hermitian) {
  if (!(spec.abs_tol > 0.0) || !(spec.rel_tol >= 0.0) || spec.max_panels < 4) {
    throw std::invalid_argument("integrate_real_line: invalid quadrature_spec");
  }

  // Fold the line onto [0, inf). Hermitian symmetry doubles the real part;
  // otherwise both half-lines are summed pointwise.
  inner_integrand g;
  if (hermitian) {
    g = [&f](double t) { return std::complex<double>(2.0 * f(t).real(), 0.0); };
  } else {
    g = [&f](double t) { return f(t) + f(-t); };
  }

  std::priority_queue<panel, std::vector<panel>, worst_first> heap;
  std::complex<double> total{};
  double err_sum = 0.0;
  std::size_t panels_used = 0;

  auto target = [&]() { return std::max(spec.abs_tol, spec.rel_tol * std::abs(total)); };

  auto refine_budget_exhausted = [&]() { return panels_used >= spec.max_panels; };

  // Adaptively integrate [a, b], pushing refined panels onto the global heap.
  // Returns the block's contribution. Local refinement stops at tol, when
  // every remaining panel sits at its noise/rounding floor (splitting cannot
  // improve those), or when the global panel budget runs out.
  auto integrate_block = [&](double a, double b, double tol) {
    std::priority_queue<panel, std::vector<panel>, worst_first> local;
    std::vector<panel> retired;
    panel p0 = eval_panel(g, a, b, spec.noise_floor_rel);
    ++panels_used;
    std::complex<double> val = p0.value;
    double err = p0.err;
    local.push(p0);
    while (err > tol && !refine_budget_exhausted() && !local.empty()) {
      panel worst = local.top();
      if (worst.err <= tol / 16.0) break;  // remaining panels are all small
      local.pop();
      const double mid = 0.5 * (worst.a + worst.b);
      if (at_floor(worst) || mid <= worst.a || mid >= worst.b) {
        retired.push_back(worst);  // unimprovable; try the next-worst panel
        continue;
      }
      panel left = eval_panel(g, worst.a, mid, spec.noise_floor_rel);
      panel right = eval_panel(g, mid, worst.b, spec.noise_floor_rel);
      ++panels_used;  // net new panels: one split adds one
      val += left.value + right.value - worst.value;
      err += left.err + right.err - worst.err;
      local.push(left);
      local.push(right);
    }
    for (const panel& p : retired) local.push(p);
    while (!local.empty()) {
      heap.push(local.top());
      local.pop();
    }
    total += val;
    err_sum += err;
    return val;
  };

  // Phase A: geometric tail extension. Blocks [0,1], [1,2], [2,4], ...,
  // stopping once three consecutive blocks contribute less than the
  // truncation threshold (or a tenth of the running error target).
  double t_hi = 1.0;
  double t_lo = 0.0;
  int quiet_blocks = 0;
  bool tail_closed = false;
  const bool accelerate = spec.oscillation_period > 0.0;
  // with an oscillation hint, hand over to cell extrapolation once the
  // geometric blocks span a couple of periods
  const double accel_from = accelerate
      ? std::max(1.0, 2.0 * spec.oscillation_period)
      : std::numeric_limits<double>::infinity();
  constexpr int kMaxBlocks = 60;
  for (int blk = 0; blk < kMaxBlocks; ++blk) {
    const double tol_block = std::max(0.02 * spec.truncation_threshold, target() / 64.0);
    const std::complex<double> contrib = integrate_block(t_lo, t_hi, tol_block);
    const double eps_tail = std::max(spec.truncation_threshold, 0.1 * target());
    if (std::abs(contrib) < eps_tail) {
      if (++quiet_blocks >= 3) {
        tail_closed = true;
        break;
      }
    } else {
      quiet_blocks = 0;
    }
    if (refine_budget_exhausted()) break;
    t_lo = t_hi;
    if (t_hi >= accel_from) break;
    t_hi *= 2.0;
  }

  // Phase A': for a slowly decaying oscillatory tail, panel-by-panel
  // certification costs O(t_max) panels. Summing half-period cells gives a
  // (nearly) alternating series whose limit the epsilon algorithm reaches
  // after a few dozen cells; the extrapolated remainder replaces the
  // untouched part of the tail.
  if (!tail_closed && accelerate && !refine_budget_exhausted()) {
    const double h = 0.5 * spec.oscillation_period;
    wynn_epsilon table;
    std::complex<double> cell_sum{};
    std::complex<double> best{}, prev_best{};
    int stable = 0;
    constexpr std::size_t kMaxCells = 512;
    for (std::size_t cell = 0; cell < kMaxCells && !refine_budget_exhausted(); ++cell) {
      const double tol_cell = std::max(0.02 * spec.truncation_threshold, target() / 512.0);
      cell_sum += integrate_block(t_lo, t_lo + h, tol_cell);
      t_lo += h;
      t_hi = t_lo;
      best = table.push(cell_sum);
      if (cell >= 5) {
        const double delta = std::abs(best - prev_best);
        if (delta < std::max(spec.truncation_threshold, 0.02 * target())) {
          if (++stable >= 2) {
            // cells already entered `total` through integrate_block; add the
            // extrapolated remainder of the series beyond them
            total += best - cell_sum;
            err_sum += 3.0 * delta;
            tail_closed = true;
            break;
          }
        } else {
          stable = 0;
        }
      }
      prev_best = best;
    }
  }

  // Phase B: global refinement until the error target is met. Panels at
  // their noise/rounding floor are set aside rather than split.
  std::vector<panel> retired;
  while (err_sum > target() && !refine_budget_exhausted() && !heap.empty()) {
    panel worst = heap.top();
    heap.pop();
    const double mid = 0.5 * (worst.a + worst.b);
    if (at_floor(worst) || mid <= worst.a || mid >= worst.b) {
      retired.push_back(worst);
      continue;
    }
    panel left = eval_panel(g, worst.a, mid, spec.noise_floor_rel);
    panel right = eval_panel(g, mid, worst.b, spec.noise_floor_rel);
    ++panels_used;
    total += left.value + right.value - worst.value;
    err_sum += left.err + right.err - worst.err;
    heap.push(left);
    heap.push(right);
  }

  integral_result out;
  out.value = hermitian ? std::complex<double>(total.real(), 0.0) : total;
  out.error = err_sum;
  out.panels = panels_used;
  out.t_max = t_hi;

  if (!tail_closed) {
    // The integrand was never observed to decay below the truncation
    // threshold, so the cut tail cannot be bounded.
    throw quadrature_convergence_error("integrate_real_line: tail did not decay within the block budget",
                                       out.value, out.error, out.panels);
  }
  if (out.error > target() * (1.0 + 1e-12)) {
    throw quadrature_convergence_error("integrate_real_line: error target not reached",
                                       out.value, out.error, out.panels);
  }
  return out;
}

eig_sym_result hermitian_eig(const arma::cx_mat& a) {
  if (!a.is_square()) throw std::invalid_argument("hermitian_eig: matrix must be square");
  if (!a.is_finite()) throw std::domain_error("hermitian_eig: non-finite entries");
  const double scale = std::max(1.0, arma::abs(a).max());
  const double asym = arma::abs(a - a.t()).max();
  if (asym > 1e-10 * scale) {
    throw std::domain_error("hermitian_eig: input is not Hermitian within tolerance");
  }
  arma::cx_mat h = 0.5 * (a + a.t());
  arma::vec vals;
  arma::cx_mat vecs;
  if (!arma::eig_sym(vals, vecs, h, "dc")) {
    throw std::runtime_error("hermitian_eig: eigendecomposition failed");
  }
  return {arma::reverse(vals), arma::fliplr(vecs)};
}

eig_sym_result hermitian_eig(const arma::mat& a) {
  if (!a.is_square()) throw std::invalid_argument("hermitian_eig: matrix must be square");
  if (!a.is_finite()) throw std::domain_error("hermitian_eig: non-finite entries");
  const double scale = std::max(1.0, arma::abs(a).max());
  const double asym = arma::abs(a - a.t()).max();
  if (asym > 1e-10 * scale) {
    throw std::domain_error("hermitian_eig: input is not symmetric within tolerance");
  }
  arma::mat h = 0.5 * (a + a.t());
  arma::vec vals;
  arma::mat vecs;
  if (!arma::eig_sym(vals, vecs, h, "dc")) {
    throw std::runtime_error("hermitian_eig: eigendecomposition failed");
  }
  return {arma::reverse(vals), arma::conv_to<arma::cx_mat>::from(arma::fliplr(vecs))};
}

arma::cx_vec general_complex_eig(const arma::cx_mat& a) {
  if (!a.is_square()) throw std::invalid_argument("general_complex_eig: matrix must be square");
  if (!a.is_finite()) throw std::domain_error("general_complex_eig: non-finite entries");
  const arma::uword n = a.n_rows;
  arma::cx_vec vals;
  if (n == 1) {
    vals = {a(0, 0)};
  } else if (n == 2) {
    const std::complex<double> half_tr = 0.5 * (a(0, 0) + a(1, 1));
    const std::complex<double> det = a(0, 0) * a(1, 1) - a(0, 1) * a(1, 0);
    const std::complex<double> disc = std::sqrt(half_tr * half_tr - det);
    vals = {half_tr - disc, half_tr + disc};
  } else {
    if (!arma::eig_gen(vals, a)) {
      throw std::runtime_error("general_complex_eig: eigendecomposition failed");
    }
  }
  std::sort(vals.begin(), vals.end(), [](std::complex<double> l, std::complex<double> r) {
    if (l.real() != r.real()) return l.real() < r.real();
    return l.imag() < r.imag();
  });
  return vals;
}

arma::mat psd_sqrt(const arma::mat& a) {
  eig_sym_result eig = hermitian_eig(a);
  const double top = eig.values.empty() ? 0.0 : std::abs(eig.values.max());
  arma::vec lam = eig.values;
  for (arma::uword i = 0; i < lam.n_elem; ++i) {
    if (lam(i) < -1e-10 * std::max(top, 1e-300)) {
      throw not_psd_error("psd_sqrt: matrix has a significantly negative eigenvalue");
    }
    lam(i) = std::max(lam(i), 0.0);
  }
  const arma::mat v = arma::real(eig.vectors);
  arma::mat r = v * arma::diagmat(arma::sqrt(lam)) * v.t();
  return 0.5 * (r + r.t());
}

}  // namespace maa::numerics
