#include "zrp/gamma.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "zrp/error.hpp"
#include "zrp/numeric.hpp"

namespace zrp {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void check_finite(const std::vector<double>& logg, const char* what) {
  for (double v : logg)
    if (!std::isfinite(v)) fail_numeric(std::string(what) + ": non-finite log-probability");
}

}  // namespace

double GammaDistribution::prob(std::int64_t n) const { return std::exp(log_prob(n)); }

double GammaDistribution::log_prob(std::int64_t n) const {
  if (n < 0 || n > N) return kNegInf;
  return logg[static_cast<std::size_t>(n)];
}

GammaDistribution gamma_product(const RateFunction& c, int v1, int v2, std::int64_t N, double rho) {
  if (v1 < 1 || v2 < 1) fail_argument("gamma_product: sub-volumes must be >= 1");
  if (N < 0) fail_argument("gamma_product: N must be >= 0");
  GammaDistribution g;
  g.N = N;
  g.v1 = v1;
  g.v2 = v2;
  g.route = GammaRoute::product_formula;
  if (N == 0) {
    g.logg = {0.0};
    return g;
  }
  const GrandCanonical gc = solve_alpha(c, rho);
  const std::vector<double> p1 = log_count_prefix(c, gc, v1, N);
  const std::vector<double> p2 = v2 == v1 ? p1 : log_count_prefix(c, gc, v2, N);
  const std::vector<double> p12 = log_count_prefix(c, gc, v1 + v2, N);
  g.logg.resize(static_cast<std::size_t>(N + 1));
  for (std::int64_t n = 0; n <= N; ++n) g.logg[n] = p1[n] + p2[N - n] - p12[N];
  check_finite(g.logg, "gamma_product (retry at rho = N/(v1+v2))");
  const double z = log_sum_exp(g.logg);
  if (std::abs(z) > 1e-9) fail_numeric("gamma_product: normalization residual " + std::to_string(z));
  normalize_log(g.logg);
  return g;
}

GammaDistribution gamma_product(const RateFunction& c, int v1, int v2, std::int64_t N) {
  const double rho = N > 0 ? static_cast<double>(N) / (v1 + v2) : 1.0;
  return gamma_product(c, v1, v2, N, rho);
}

GammaDistribution gamma_from_table(const CanonicalTable& t, int v1, int v2, std::int64_t N) {
  if (v1 < 0 || v2 < 0 || v1 + v2 > t.volume() || v1 + v2 < 1) fail_argument("gamma_from_table: bad volumes");
  if (N < 0 || N > t.N_max()) fail_argument("gamma_from_table: N outside table");
  GammaDistribution g;
  g.N = N;
  g.v1 = v1;
  g.v2 = v2;
  g.route = GammaRoute::recursion;
  g.logg.resize(static_cast<std::size_t>(N + 1));
  for (std::int64_t n = 0; n <= N; ++n) g.logg[n] = t.logZ(v1, n) + t.logZ(v2, N - n) - t.logZ(v1 + v2, N);
  return g;
}

GammaDistribution gamma_recursive(const RateFunction& c, const Split& s, std::int64_t N) {
  if (s.v1a < 1 || s.v2a < 1 || s.v1b < 1 || s.v2b < 1) fail_argument("gamma_recursive: invalid split geometry");
  if (N < 0) fail_argument("gamma_recursive: N must be >= 0");
  const int n1 = s.v1a + s.v1b;  // |Lambda_1|
  const int n2 = s.v2a + s.v2b;  // |Lambda_2|
  const CanonicalTable t(c, n1 + n2, N);
  const GammaDistribution outer = gamma_from_table(t, n1, n2, N);
  GammaDistribution g;
  g.N = N;
  g.v1 = s.v1a + s.v2a;
  g.v2 = s.v1b + s.v2b;
  g.route = GammaRoute::recursion;
  g.logg.assign(static_cast<std::size_t>(N + 1), kNegInf);
  std::vector<GammaDistribution> inner1;
  std::vector<GammaDistribution> inner2;
  inner1.reserve(static_cast<std::size_t>(N + 1));
  inner2.reserve(static_cast<std::size_t>(N + 1));
  for (std::int64_t k = 0; k <= N; ++k) {
    inner1.push_back(gamma_from_table(t, s.v1a, s.v1b, k));
    inner2.push_back(gamma_from_table(t, s.v2a, s.v2b, k));
  }
  std::vector<double> terms;
  for (std::int64_t n = 0; n <= N; ++n) {
    terms.clear();
    for (std::int64_t k = 0; k <= N; ++k) {
      const std::int64_t h_lo = std::max<std::int64_t>(0, n - (N - k));
      const std::int64_t h_hi = std::min(k, n);
      for (std::int64_t h = h_lo; h <= h_hi; ++h)
        terms.push_back(outer.logg[k] + inner1[k].logg[h] + inner2[N - k].logg[n - h]);
    }
    g.logg[n] = log_sum_exp(terms);
  }
  check_finite(g.logg, "gamma_recursive");
  const double z = log_sum_exp(g.logg);
  if (std::abs(z) > 1e-9) fail_numeric("gamma_recursive: normalization residual " + std::to_string(z));
  normalize_log(g.logg);
  return g;
}

RatioDiagnostics ratio_diagnostics(const GammaDistribution& g) {
  if (g.N < 1) fail_argument("ratio_diagnostics: N must be >= 1");
  RatioDiagnostics r;
  double worst = -kInf;
  for (std::int64_t n = 0; n < g.N; ++n) {
    const double lr = g.logg[n + 1] - g.logg[n];
    const double target = std::log(static_cast<double>(g.N - n) / static_cast<double>(n + 1));
    const double dev = std::abs(lr - target);
    if (dev > worst) {
      worst = dev;
      r.binding_dec = n;
    }
  }
  r.A0_dec = std::exp(worst);
  worst = -kInf;
  for (std::int64_t n = 1; n <= g.N; ++n) {
    const double lq = g.logg[n - 1] - g.logg[n];
    const double target = std::log(static_cast<double>(n) / static_cast<double>(g.N - n + 1));
    const double dev = std::abs(lq - target);
    if (dev > worst) {
      worst = dev;
      r.binding_ratio = n;
    }
  }
  r.A0_ratio = std::exp(worst);
  return r;
}

namespace {

// Smallest x with pred(x) true, pred monotone false -> true on the real line.
template <class Pred>
double smallest_true(Pred pred, double lo, double hi) {
  while (!pred(hi)) {
    hi *= 2.0;
    if (hi > 1e6) return kInf;
  }
  while (pred(lo)) {
    lo -= 2.0 * std::abs(lo) + 1.0;
    if (lo < -1e6) return -kInf;
  }
  for (int it = 0; it < 200 && hi - lo > 1e-14 * std::max(1.0, std::abs(hi)); ++it) {
    const double mid = 0.5 * (lo + hi);
    (pred(mid) ? hi : lo) = mid;
  }
  return hi;
}

}  // namespace

EnvelopeFit gaussian_envelope(const GammaDistribution& g) {
  if (g.v1 != g.v2) fail_argument("gaussian_envelope: requires v1 == v2");
  if (g.N < 1) fail_argument("gaussian_envelope: N must be >= 1");
  const std::int64_t nbar = (g.N + 1) / 2;
  const double nb = static_cast<double>(nbar);
  const double half_log_nb = 0.5 * std::log(nb);
  EnvelopeFit fit;
  double best_log = -kInf;
  for (std::int64_t n = 0; n <= g.N; ++n) {
    const double d2 = static_cast<double>((n - nbar) * (n - nbar));
    const double lg = g.logg[n];
    // in terms of u = log A
    auto upper_ok = [&](double u) { return u - half_log_nb - d2 / (std::exp(u) * nb) >= lg; };
    auto lower_ok = [&](double u) { return -u - half_log_nb - std::exp(u) * d2 / nb <= lg; };
    const double u = std::max(smallest_true(upper_ok, -1.0, 1.0), smallest_true(lower_ok, -1.0, 1.0));
    if (u > best_log) {
      best_log = u;
      fit.binding_n = n;
    }
  }
  fit.A0 = std::exp(best_log);
  return fit;
}

const GrandCanonical& FugacityCache::at(double rho) {
  auto it = cache_.find(rho);
  if (it != cache_.end()) return it->second;
  return cache_.emplace(rho, solve_alpha(c_, rho)).first->second;
}

double regularization_potential(FugacityCache& fug, int v, std::int64_t N, double x) {
  const double Nd = static_cast<double>(N);
  const double vd = static_cast<double>(v);
  const double nbar = static_cast<double>((N + 1) / 2);
  // x log alpha(x/v) - v log Z(x/v), with the density-zero limit equal to 0
  auto part = [&](double y) {
    if (y <= 0.0) return 0.0;
    const GrandCanonical& gc = fug.at(y / vd);
    return y * gc.log_alpha - vd * gc.logZ;
  };
  const GrandCanonical& mid = fug.at(nbar / vd);
  return part(x) + part(Nd - x) - Nd * mid.log_alpha + 2.0 * vd * mid.logZ;
}

double RegularizedGamma::equivalence_constant(const GammaDistribution& g) const {
  double m = 0.0;
  for (std::int64_t n = 0; n <= N; ++n) m = std::max(m, std::abs(g.logg[n] - logg_tilde[n]));
  return m;
}

RegularizedGamma regularize(const GammaDistribution& g, double epsilon, FugacityCache& fug) {
  if (!(epsilon > 0.0 && epsilon < 0.25)) fail_argument("regularize: epsilon must lie in (0, 1/4)");
  if (g.v1 != g.v2) fail_argument("regularize: requires v1 == v2");
  if (g.N < 1) fail_argument("regularize: N must be >= 1");
  RegularizedGamma rg;
  rg.epsilon = epsilon;
  rg.N = g.N;
  rg.v = g.v1;
  rg.Nbar = (g.N + 1) / 2;
  const double Nd = static_cast<double>(g.N);
  rg.window_lo = static_cast<std::int64_t>(std::ceil(epsilon * Nd));
  rg.window_hi = static_cast<std::int64_t>(std::floor((1.0 - epsilon) * Nd));
  rg.logg_tilde = g.logg;
  if (rg.window_lo > rg.window_hi) return rg;
  std::vector<double> minus_h;
  std::vector<double> in_gamma;
  for (std::int64_t n = rg.window_lo; n <= rg.window_hi; ++n) {
    const double H = regularization_potential(fug, rg.v, g.N, static_cast<double>(n));
    rg.H.push_back(H);
    minus_h.push_back(-H);
    in_gamma.push_back(g.logg[n]);
  }
  rg.logZeps = log_sum_exp(minus_h) - log_sum_exp(in_gamma);
  for (std::int64_t n = rg.window_lo; n <= rg.window_hi; ++n) rg.logg_tilde[n] = -rg.H_at(n) - rg.logZeps;
  const double z = log_sum_exp(rg.logg_tilde);
  if (std::abs(z) > 1e-12) fail_numeric("regularize: normalization residual " + std::to_string(z));
  return rg;
}

RegularizedGamma regularize(const GammaDistribution& g, double epsilon, const RateFunction& c) {
  FugacityCache fug(c);
  return regularize(g, epsilon, fug);
}

TailReport tail_monotonicity(const RegularizedGamma& rg) {
  TailReport r;
  const std::int64_t N = rg.N;
  const double nb = static_cast<double>(rg.Nbar);
  const auto& lt = rg.logg_tilde;
  auto bump = [](double& best, std::int64_t& at, double val, std::int64_t n) {
    if (val > best) {
      best = val;
      at = n;
    }
  };
  for (std::int64_t n = rg.Nbar + 1; n < N; ++n) {
    const double lr = lt[n + 1] - lt[n];
    const double need = lr < 0.0 ? (static_cast<double>(n) - nb) / (nb * -lr) : kInf;
    bump(r.A_upper, r.binding_upper, need, n);
  }
  for (std::int64_t n = 1; n < rg.Nbar; ++n) {
    const double lr = lt[n - 1] - lt[n];
    const double need = lr < 0.0 ? (nb - static_cast<double>(n)) / (nb * -lr) : kInf;
    bump(r.A_lower, r.binding_lower, need, n);
  }
  for (std::int64_t n = rg.window_lo; n <= rg.window_hi; ++n) {
    double dH = 0.0;
    double dist = 0.0;
    if (n > rg.Nbar && n + 1 <= rg.window_hi) {
      dH = rg.H_at(n + 1) - rg.H_at(n);
      dist = static_cast<double>(n) - nb;
    } else if (n < rg.Nbar && n - 1 >= rg.window_lo) {
      dH = rg.H_at(n - 1) - rg.H_at(n);
      dist = nb - static_cast<double>(n);
    } else {
      continue;
    }
    const double need = dH > 0.0 ? std::max(dist / (nb * dH), dH * nb / dist) : kInf;
    bump(r.A_H, r.binding_H, need, n);
  }
  for (std::int64_t n = 0; n < N; ++n) {
    if (rg.in_window(n) && rg.in_window(n + 1)) continue;
    if (n >= rg.window_hi) r.max_tail_ratio = std::max(r.max_tail_ratio, std::exp(lt[n + 1] - lt[n]));
    if (n + 1 <= rg.window_lo) r.max_tail_ratio = std::max(r.max_tail_ratio, std::exp(lt[n] - lt[n + 1]));
  }
  return r;
}

DerivativeCheck H_derivative_check(const RateFunction& c, int v, std::int64_t N,
                                   const std::vector<double>& x_grid) {
  FugacityCache fug(c);
  DerivativeCheck out;
  const double Nd = static_cast<double>(N);
  for (double x : x_grid) {
    if (!(x > 0.0 && x < Nd)) fail_argument("H_derivative_check: grid point outside (0, N)");
    const double step = 1e-3 * std::min({1.0, x, Nd - x});
    const double fd = (regularization_potential(fug, v, N, x + step) -
                       regularization_potential(fug, v, N, x - step)) /
                      (2.0 * step);
    const double exact = fug.at(x / v).log_alpha - fug.at((Nd - x) / v).log_alpha;
    const double res = std::abs(fd - exact) / std::max(1.0, std::abs(exact));
    if (res >= out.max_residual) {
      out.max_residual = res;
      out.binding_x = x;
    }
  }
  return out;
}

}  // namespace zrp
