#include "zrp/identities.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include "zrp/error.hpp"
#include "zrp/measures.hpp"
#include "zrp/numeric.hpp"

namespace zrp {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

std::vector<double> block_weights(const StateSpace& s, const RateFunction& c) {
  std::vector<double> lw(static_cast<std::size_t>(s.size()));
  for (std::int64_t i = 0; i < s.size(); ++i) {
    double a = 0.0;
    for (auto k : s.state(i)) a -= c.log_factorial(k);
    lw[i] = a;
  }
  normalize_log(lw);
  for (auto& x : lw) x = std::exp(x);
  return lw;
}

double sum_c(const RateFunction& c, std::span<const std::uint16_t> eta, int lo, int hi) {
  double s = 0.0;
  for (int x = lo; x < hi; ++x) s += c(eta[x]);
  return s;
}

double sum_h(const RateFunction& c, std::span<const std::uint16_t> eta, int lo, int hi) {
  double s = 0.0;
  for (int x = lo; x < hi; ++x) s += c.h(eta[x]);
  return s;
}

double uniform01(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

}  // namespace

SplitSystem::SplitSystem(RateFunction c, int L, int N) : c_(std::move(c)), L_(L), N_(N) {
  if (L < 1) fail_argument("SplitSystem: block size L must be >= 1");
  if (N < 0) fail_argument("SplitSystem: N must be >= 0");
  space_ = StateSpace(2 * L, 1, N);
  const std::int64_t S = space_.size();
  std::vector<double> lw(static_cast<std::size_t>(S));
  level_.resize(static_cast<std::size_t>(S));
  by_level_.assign(static_cast<std::size_t>(N + 1), {});
  for (std::int64_t i = 0; i < S; ++i) {
    const auto eta = space_.state(i);
    double a = 0.0;
    int n1 = 0;
    for (int x = 0; x < 2 * L; ++x) {
      a -= c_.log_factorial(eta[x]);
      if (x < L) n1 += eta[x];
    }
    lw[i] = a;
    level_[i] = n1;
    by_level_[n1].push_back(i);
  }
  normalize_log(lw);
  w_.resize(lw.size());
  for (std::size_t i = 0; i < lw.size(); ++i) w_[i] = std::exp(lw[i]);
  gamma_.assign(static_cast<std::size_t>(N + 1), 0.0);
  for (std::int64_t i = 0; i < S; ++i) gamma_[level_[i]] += w_[i];

  blocks_.resize(static_cast<std::size_t>(N + 1));
  std::vector<std::uint16_t> eta(static_cast<std::size_t>(2 * L));
  for (int n = 0; n <= N; ++n) {
    Block& b = blocks_[n];
    b.s1 = StateSpace(L, 1, n);
    b.s2 = StateSpace(L, 1, N - n);
    b.w1 = block_weights(b.s1, c_);
    b.w2 = block_weights(b.s2, c_);
    b.idx.resize(static_cast<std::size_t>(b.s1.size() * b.s2.size()));
    for (std::int64_t a = 0; a < b.s1.size(); ++a) {
      const auto e1 = b.s1.state(a);
      std::copy(e1.begin(), e1.end(), eta.begin());
      for (std::int64_t k = 0; k < b.s2.size(); ++k) {
        const auto e2 = b.s2.state(k);
        std::copy(e2.begin(), e2.end(), eta.begin() + L);
        b.idx[a * b.s2.size() + k] = space_.rank(eta);
      }
    }
  }
}

double SplitSystem::total_probability_residual() const {
  double worst = 0.0;
  for (int n = 0; n <= N_; ++n) {
    const Block& b = blocks_[n];
    for (std::int64_t a = 0; a < b.s1.size(); ++a)
      for (std::int64_t k = 0; k < b.s2.size(); ++k) {
        const std::int64_t i = b.idx[a * b.s2.size() + k];
        worst = std::max(worst, std::abs(gamma_[n] * b.w1[a] * b.w2[k] / w_[i] - 1.0));
      }
  }
  return worst;
}

double SplitSystem::cond_mean(std::span<const double> f, int n) const {
  double s = 0.0;
  for (auto i : by_level_[n]) s += w_[i] * f[i];
  return s / gamma_[n];
}

double SplitSystem::cond_cov(std::span<const double> f, std::span<const double> g, int n) const {
  const double mf = cond_mean(f, n);
  const double mg = cond_mean(g, n);
  double s = 0.0;
  for (auto i : by_level_[n]) s += w_[i] * (f[i] - mf) * (g[i] - mg);
  return s / gamma_[n];
}

double SplitSystem::cond_entropy(std::span<const double> f, int n) const {
  const auto& lv = by_level_[n];
  std::vector<double> mu(lv.size());
  std::vector<double> v(lv.size());
  for (std::size_t k = 0; k < lv.size(); ++k) {
    mu[k] = w_[lv[k]] / gamma_[n];
    v[k] = f[lv[k]];
  }
  return entropy(mu, v);
}

double SplitSystem::cond_dirichlet(std::span<const double> g, int n, bool within_blocks) const {
  double s = 0.0;
  for (auto i : by_level_[n]) {
    const auto eta = space_.state(i);
    double local = 0.0;
    for (int x = 0; x < 2 * L_; ++x) {
      if (eta[x] == 0) continue;
      const double cx = c_(eta[x]);
      for (int y : space_.neighbors(x)) {
        if (within_blocks && in_first(x) != in_first(y)) continue;
        const double d = g[space_.move(i, x, y)] - g[i];
        local += cx * d * d;
      }
    }
    s += w_[i] * local;
  }
  return 0.5 * s / gamma_[n];
}

TestFunctionSet TestFunctionSet::make(std::int64_t states, int count, std::uint64_t seed) {
  TestFunctionSet set;
  set.seed = seed;
  std::mt19937_64 rng(seed);
  set.f.resize(static_cast<std::size_t>(count));
  for (auto& f : set.f) {
    f.resize(static_cast<std::size_t>(states));
    for (auto& v : f) v = std::exp(-3.0 + 6.0 * uniform01(rng));
  }
  return set;
}

double relative_residual(double a, double b, double scale) {
  const double den = std::max({std::abs(a), std::abs(b), std::abs(scale)});
  if (den == 0.0) return 0.0;
  return std::abs(a - b) / den;
}

ReversibilityCheck verify_reversibility(const SplitSystem& sys, std::span<const double> f, int x, int y, int n) {
  const int sites = 2 * sys.L();
  if (x < 0 || y < 0 || x >= sites || y >= sites || x == y) fail_argument("verify_reversibility: bad sites");
  if (n < 0 || n > sys.N()) fail_argument("verify_reversibility: n out of range");
  const int m = n - (sys.in_first(x) ? 1 : 0) + (sys.in_first(y) ? 1 : 0);
  if (m < 0 || m > sys.N()) fail_argument("verify_reversibility: transported level out of range");
  const auto& c = sys.rate();
  const auto& w = sys.weights();
  const StateSpace& sp = sys.space();

  ReversibilityCheck r;
  double lhs = 0.0;
  for (auto i : sys.level(n))
    if (sp.state(i)[x] > 0) lhs += w[i] * f[i];
  r.lhs = lhs / sys.gamma(n);

  double rhs = 0.0;
  for (auto i : sys.level(m)) {
    const auto eta = sp.state(i);
    if (eta[y] == 0) continue;
    rhs += w[i] * c(eta[y]) / c(eta[x] + 1) * f[sp.move(i, y, x)];
  }
  r.rhs = rhs / sys.gamma(n);
  r.residual = relative_residual(r.lhs, r.rhs);
  return r;
}

GradientCheck verify_gradient_representation(const SplitSystem& sys, std::span<const double> f, int n) {
  const int N = sys.N();
  const int L = sys.L();
  if (n < 1 || n > N) fail_argument("verify_gradient_representation: need 1 <= n <= N");
  const auto& c = sys.rate();
  const auto& w = sys.weights();
  const StateSpace& sp = sys.space();
  const std::int64_t S = sys.size();

  GradientCheck g;
  const double mn = sys.cond_mean(f, n);
  const double mp = sys.cond_mean(f, n - 1);
  g.lhs = mn - mp;

  std::vector<double> G(static_cast<std::size_t>(S), 0.0);
  double t = 0.0;
  for (auto i : sys.level(n - 1)) {
    const auto eta = sp.state(i);
    double local = 0.0;
    for (int x = 0; x < L; ++x)
      for (int y = L; y < 2 * L; ++y) {
        if (eta[y] == 0) continue;
        local += c.h(eta[x]) * c(eta[y]) * (f[sp.move(i, y, x)] - f[i]);
      }
    t += w[i] * local;
    G[i] = sum_h(c, eta, 0, L) * sum_c(c, eta, L, 2 * L);
  }
  g.transport_forward = t / sys.gamma(n - 1);
  g.covariance_forward = sys.cond_cov(f, G, n - 1);
  g.coeff_forward = sys.gamma(n - 1) / sys.gamma(n) / (static_cast<double>(n) * L);
  g.rhs_forward = g.coeff_forward * (g.transport_forward + g.covariance_forward);

  t = 0.0;
  for (auto i : sys.level(n)) {
    const auto eta = sp.state(i);
    double local = 0.0;
    for (int x = 0; x < L; ++x) {
      if (eta[x] == 0) continue;
      for (int y = L; y < 2 * L; ++y) local += c.h(eta[y]) * c(eta[x]) * (f[sp.move(i, x, y)] - f[i]);
    }
    t += w[i] * local;
    G[i] = sum_h(c, eta, L, 2 * L) * sum_c(c, eta, 0, L);
  }
  g.transport_backward = t / sys.gamma(n);
  g.covariance_backward = sys.cond_cov(f, G, n);
  g.coeff_backward = -sys.gamma(N - n) / sys.gamma(N - n + 1) / (static_cast<double>(N - n + 1) * L);
  g.rhs_backward = g.coeff_backward * (g.transport_backward + g.covariance_backward);

  const double scale = std::max(std::abs(mn), std::abs(mp));
  g.residual_forward = relative_residual(g.lhs, g.rhs_forward, scale);
  g.residual_backward = relative_residual(g.lhs, g.rhs_backward, scale);
  return g;
}

ABSplit decompose_AB(const SplitSystem& sys, std::span<const double> f, int n) {
  const GradientCheck g = verify_gradient_representation(sys, f, n);
  ABSplit s;
  s.gradient = g.lhs;
  s.upper_branch = 2 * n >= sys.N();
  if (s.upper_branch) {
    s.A = g.coeff_forward * g.transport_forward;
    s.B = g.coeff_forward * g.covariance_forward;
  } else {
    s.A = g.coeff_backward * g.transport_backward;
    s.B = g.coeff_backward * g.covariance_backward;
  }
  s.residual = relative_residual(s.gradient, s.A + s.B,
                                 std::max(std::abs(sys.cond_mean(f, n)), std::abs(sys.cond_mean(f, n - 1))));
  return s;
}

ABoundFit verify_A_bound(const SplitSystem& sys, const std::vector<std::vector<double>>& fs) {
  const int N = sys.N();
  const int L = sys.L();
  ABoundFit fit;
  if (N < 1) return fit;
  const double pref = static_cast<double>(L) * L / N;
  std::vector<double> root;
  for (std::size_t k = 0; k < fs.size(); ++k) {
    const auto& f = fs[k];
    root.resize(f.size());
    for (std::size_t i = 0; i < f.size(); ++i) {
      if (!(f[i] > 0.0)) fail_argument("verify_A_bound: f must be positive");
      root[i] = std::sqrt(f[i]);
    }
    for (int n = 1; n <= N; ++n) {
      const double A = decompose_AB(sys, f, n).A;
      const double A2 = A * A;
      const double m = std::max(sys.cond_mean(f, n), sys.cond_mean(f, n - 1));
      const double r = sys.gamma(n - 1) / sys.gamma(n);
      for (int within = 0; within < 2; ++within) {
        const double E = r * sys.cond_dirichlet(root, n - 1, within) + sys.cond_dirichlet(root, n, within);
        const double D = pref * m * E;
        double C = 0.0;
        if (A2 > 0.0) C = D > 0.0 ? A2 / D : kInf;
        double& target = within ? fit.C_within : fit.C_all_edges;
        if (C > target) {
          target = C;
          (within ? fit.binding_n_within : fit.binding_n) = n;
          (within ? fit.binding_f_within : fit.binding_f) = static_cast<int>(k);
        }
      }
    }
  }
  return fit;
}

TensorizationCheck entropy_tensorization(const SplitSystem& sys, std::span<const double> f) {
  const int N = sys.N();
  TensorizationCheck t;
  t.entropy = entropy(sys.weights(), f);
  std::vector<double> m(static_cast<std::size_t>(N + 1));
  for (int n = 0; n <= N; ++n) {
    m[n] = sys.cond_mean(f, n);
    t.conditional += sys.gamma(n) * sys.cond_entropy(f, n);
  }
  t.projected = entropy(sys.gamma(), m);
  t.identity_residual = relative_residual(t.entropy, t.conditional + t.projected, mean(sys.weights(), f));

  std::vector<double> col;
  for (int n = 0; n <= N; ++n) {
    const auto& w1 = sys.block1_weights(n);
    const auto& w2 = sys.block2_weights(n);
    const auto& idx = sys.index(n);
    const std::size_t n1 = w1.size();
    const std::size_t n2 = w2.size();
    double e = 0.0;
    col.resize(n1);
    for (std::size_t b = 0; b < n2; ++b) {
      for (std::size_t a = 0; a < n1; ++a) col[a] = f[idx[a * n2 + b]];
      e += w2[b] * entropy(w1, col);
    }
    col.resize(n2);
    for (std::size_t a = 0; a < n1; ++a) {
      for (std::size_t b = 0; b < n2; ++b) col[b] = f[idx[a * n2 + b]];
      e += w1[a] * entropy(w2, col);
    }
    t.block_sum += sys.gamma(n) * e;
  }
  t.inequality_gap = t.block_sum - t.conditional;
  return t;
}

namespace {

// log mu[exp(t (g - mu[g]))]
double log_mgf(std::span<const double> mu, std::span<const double> g, double mg, double t) {
  double hi = kNegInf;
  for (std::size_t i = 0; i < mu.size(); ++i)
    if (mu[i] > 0.0) hi = std::max(hi, t * (g[i] - mg));
  double s = 0.0;
  for (std::size_t i = 0; i < mu.size(); ++i)
    if (mu[i] > 0.0) s += mu[i] * std::exp(t * (g[i] - mg) - hi);
  return hi + std::log(s);
}

}  // namespace

EntropyInequality entropy_inequality(std::span<const double> mu, std::span<const double> f,
                                     std::span<const double> g, double t) {
  if (!(t > 0.0)) fail_argument("entropy_inequality: t must be positive");
  const double mf = mean(mu, f);
  const double mg = mean(mu, g);
  const double cov = covariance(mu, f, g);
  const double ent = entropy(mu, f);
  auto rhs = [&](double s) {
    const double lm = std::max(log_mgf(mu, g, mg, s), log_mgf(mu, g, mg, -s));
    return mf / s * lm + ent / s;
  };
  EntropyInequality r;
  r.slack = rhs(t) - std::abs(cov);
  r.slack_one_sided = mf / t * log_mgf(mu, g, mg, t) + ent / t - cov;
  r.rhs_min = kInf;
  r.min_slack_grid = kInf;
  for (int k = -60; k <= 60; ++k) {
    const double s = std::pow(10.0, k / 20.0);
    const double v = rhs(s);
    if (v < r.rhs_min) {
      r.rhs_min = v;
      r.t_star = s;
    }
    r.min_slack_grid = std::min(r.min_slack_grid, v - std::abs(cov));
  }
  return r;
}

std::vector<double> default_t_grid() {
  std::vector<double> t;
  for (int k = -20; k <= 20; ++k) t.push_back(k / 20.0);
  return t;
}

MgfFit mgf_bounds(const RateFunction& c, int volume, std::int64_t N_lo, std::int64_t N_hi,
                  const std::vector<double>& t_grid) {
  if (volume < 2) fail_argument("mgf_bounds: volume must be >= 2");
  if (N_hi < N_lo || N_hi < 1) fail_argument("mgf_bounds: empty N range");
  for (double t : t_grid)
    if (t < -1.0 || t > 1.0) fail_argument("mgf_bounds: t must lie in [-1, 1]");
  const CanonicalTable table = canonical_table(c, volume, N_hi);
  MgfFit fit;
  std::vector<double> p;
  std::vector<double> cv;
  std::vector<double> hv;
  for (std::int64_t N = std::max<std::int64_t>(1, N_lo); N <= N_hi; ++N) {
    const CountDistribution m = canonical_site_marginal(table, N);
    const std::size_t K = m.logp.size();
    p.resize(K);
    cv.resize(K);
    hv.resize(K);
    for (std::size_t k = 0; k < K; ++k) {
      p[k] = std::exp(m.logp[k]);
      cv[k] = c(static_cast<std::int64_t>(k));
      hv[k] = static_cast<double>(N) * c.h(static_cast<std::int64_t>(k));
    }
    const double mc = mean(p, cv);
    const double mh = mean(p, hv);
    const double sN = std::sqrt(static_cast<double>(N));
    for (double t : t_grid) {
      if (t != 0.0) {
        const double A = log_mgf(p, cv, mc, t) / (static_cast<double>(N) * t * t);
        if (A > fit.A_c) {
          fit.A_c = A;
          fit.binding_N_c = N;
          fit.binding_t_c = t;
        }
      }
      // smallest A with log A + A s >= target; the left side increases in A
      const double target = log_mgf(p, hv, mh, t);
      const double s = static_cast<double>(N) * t * t + sN * std::abs(t);
      double lo = -60.0;
      double hi = 60.0;
      for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (mid + std::exp(mid) * s >= target)
          hi = mid;
        else
          lo = mid;
      }
      const double A = std::exp(hi);
      if (A > fit.A_h) {
        fit.A_h = A;
        fit.binding_N_h = N;
        fit.binding_t_h = t;
      }
    }
  }
  return fit;
}

CovarianceFit covariance_bounds(const RateFunction& c, int volume, std::int64_t N_lo, std::int64_t N_hi,
                                int f_count, std::uint64_t seed) {
  if (volume < 1) fail_argument("covariance_bounds: volume must be >= 1");
  CovarianceFit fit;
  for (std::int64_t N = std::max<std::int64_t>(1, N_lo); N <= N_hi; ++N) {
    const StateSpace sp(volume, 1, static_cast<int>(N));
    const std::vector<double> w = block_weights(sp, c);
    std::vector<double> sc(w.size());
    std::vector<double> sh(w.size());
    for (std::int64_t i = 0; i < sp.size(); ++i) {
      sc[i] = sum_c(c, sp.state(i), 0, volume);
      sh[i] = sum_h(c, sp.state(i), 0, volume);
    }
    const TestFunctionSet fs = TestFunctionSet::make(sp.size(), f_count, seed + static_cast<std::uint64_t>(N));
    for (int k = 0; k < f_count; ++k) {
      const auto& f = fs.f[k];
      const double mf = mean(w, f);
      const double ent = entropy(w, f);
      const double cov_c = covariance(w, f, sc);
      const double cov_h = covariance(w, f, sh);
      fit.max_abs_cov_c = std::max(fit.max_abs_cov_c, std::abs(cov_c));
      const double den_c = static_cast<double>(N) * mf * ent;
      const double C_c = den_c > 0.0 ? cov_c * cov_c / den_c : (cov_c != 0.0 ? kInf : 0.0);
      if (C_c > fit.C_c) {
        fit.C_c = C_c;
        fit.binding_N_c = N;
        fit.binding_f_c = k;
      }
      const double C_h = cov_h * cov_h * static_cast<double>(N) / (mf * (mf + ent));
      if (C_h > fit.C_h) {
        fit.C_h = C_h;
        fit.binding_N_h = N;
        fit.binding_f_h = k;
      }
    }
  }
  return fit;
}

double rothaus_check(std::span<const double> mu, std::span<const double> f) {
  std::vector<double> r(f.size());
  for (std::size_t i = 0; i < f.size(); ++i) {
    if (!(f[i] >= 0.0)) fail_argument("rothaus_check: f must be nonnegative");
    r[i] = std::sqrt(f[i]);
  }
  const double mr = mean(mu, r);
  std::vector<double> fbar(f.size());
  for (std::size_t i = 0; i < f.size(); ++i) fbar[i] = (r[i] - mr) * (r[i] - mr);
  return entropy(mu, fbar) + 2.0 * covariance(mu, r, r) - entropy(mu, f);
}

RatioFit ratio_constant(const GammaDistribution& g) {
  const RatioDiagnostics d = ratio_diagnostics(g);
  return {d.A0_ratio, d.binding_ratio};
}

}  // namespace zrp
