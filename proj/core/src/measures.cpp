#include "zrp/measures.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "zrp/error.hpp"
#include "zrp/numeric.hpp"

namespace zrp {

namespace {

constexpr double kSeriesTol = 1e-17;
constexpr std::int64_t kSeriesMax = 50'000'000;

// Log-terms k log(alpha) - F(k) until past the mode and the remaining tail is negligible.
std::vector<double> site_terms(const RateFunction& c, double log_alpha) {
  std::vector<double> t;
  double running = kNegInf;
  double prev = kNegInf;
  for (std::int64_t k = 0;; ++k) {
    if (k > kSeriesMax) fail_numeric("grand canonical series did not terminate");
    const double v = static_cast<double>(k) * log_alpha - c.log_factorial(k);
    t.push_back(v);
    running = log_add_exp(running, v);
    if (k > 0 && v < prev) {
      // next-term ratio alpha/c(k+1) bounds the geometric tail
      const double log_r = log_alpha - std::log(c(k + 1));
      if (log_r < 0.0) {
        const double log_tail = v + log_r - std::log1p(-std::exp(log_r));
        if (log_tail < running + std::log(kSeriesTol)) break;
      }
    }
    prev = v;
  }
  return t;
}

}  // namespace

SiteSeries site_series(const RateFunction& c, double log_alpha) {
  const std::vector<double> t = site_terms(c, log_alpha);
  SiteSeries s;
  s.logZ = log_sum_exp(t);
  s.K = static_cast<std::int64_t>(t.size()) - 1;
  double m = 0.0;
  for (std::size_t k = 0; k < t.size(); ++k) m += static_cast<double>(k) * std::exp(t[k] - s.logZ);
  double v = 0.0;
  for (std::size_t k = 0; k < t.size(); ++k) {
    const double d = static_cast<double>(k) - m;
    v += d * d * std::exp(t[k] - s.logZ);
  }
  s.mean = m;
  s.var = v;
  return s;
}

double GrandCanonical::site_log_prob(const RateFunction& c, std::int64_t k) const {
  if (alpha == 0.0) return k == 0 ? 0.0 : kNegInf;
  return static_cast<double>(k) * log_alpha - c.log_factorial(k) - logZ;
}

GrandCanonical solve_alpha(const RateFunction& c, double rho) {
  if (!(rho > 0.0) || !std::isfinite(rho)) fail_argument("solve_alpha: rho must be positive");
  auto mean_at = [&](double a) { return a <= 0.0 ? 0.0 : site_series(c, std::log(a)).mean; };
  double lo = 0.0;
  double hi = c.A0() * rho * 1.5;
  int expand = 0;
  while (mean_at(hi) < rho) {
    lo = hi;
    hi *= 2.0;
    if (++expand > 200) fail_numeric("solve_alpha: could not bracket rho = " + std::to_string(rho));
  }
  const double tol = 1e-12 * rho;
  // Bisection to a coarse bracket, then Newton in log alpha (d mean / d log alpha = variance).
  double a = 0.5 * (lo + hi);
  for (int it = 0; it < 200; ++it) {
    a = 0.5 * (lo + hi);
    const double m = mean_at(a);
    if (std::abs(m - rho) <= 1e-8 * rho) break;
    (m < rho ? lo : hi) = a;
    if (hi - lo <= 4.0 * std::numeric_limits<double>::epsilon() * hi) break;
  }
  double la = std::log(a);
  SiteSeries s = site_series(c, la);
  for (int it = 0; it < 30; ++it) {
    if (std::abs(s.mean - rho) <= 2.0 * std::numeric_limits<double>::epsilon() * rho) break;
    const double step = (s.mean - rho) / s.var;
    if (!std::isfinite(step) || step == 0.0) break;
    const SiteSeries t = site_series(c, la - step);
    if (std::abs(t.mean - rho) >= std::abs(s.mean - rho)) break;
    la -= step;
    s = t;
  }
  if (!(std::abs(s.mean - rho) <= tol))
    fail_numeric("solve_alpha: no convergence for rho = " + std::to_string(rho));
  GrandCanonical g;
  g.rho = rho;
  g.log_alpha = la;
  g.alpha = std::exp(la);
  g.logZ = s.logZ;
  g.sigma2 = s.var;
  g.trunc_K = s.K;
  g.tail_tol = kSeriesTol;
  g.mean_residual = std::abs(s.mean - rho) / rho;
  return g;
}

double CountDistribution::prob(std::int64_t n) const {
  if (n < 0 || n >= static_cast<std::int64_t>(logp.size())) return 0.0;
  return std::exp(logp[static_cast<std::size_t>(n)]);
}

double CountDistribution::mean() const {
  double m = 0.0;
  for (std::size_t n = 0; n < logp.size(); ++n) m += static_cast<double>(n) * std::exp(logp[n]);
  return m;
}

std::vector<double> log_count_prefix(const RateFunction& c, const GrandCanonical& gc, int volume,
                                     std::int64_t n_max) {
  if (volume < 1) fail_argument("count distribution: volume must be >= 1");
  if (n_max < 0) fail_argument("count distribution: cap must be >= 0");
  const auto len = static_cast<std::size_t>(n_max + 1);
  std::vector<double> site(len);
  for (std::size_t k = 0; k < len; ++k) site[k] = gc.site_log_prob(c, static_cast<std::int64_t>(k));
  // binary powering of the convolution
  std::vector<double> result;
  std::vector<double> base = site;
  int v = volume;
  bool have = false;
  while (v > 0) {
    if (v & 1) {
      result = have ? log_convolve(result, base, len) : base;
      have = true;
    }
    v >>= 1;
    if (v > 0) base = log_convolve(base, base, len);
  }
  return result;
}

CountDistribution count_distribution(const RateFunction& c, double rho, int volume, std::int64_t cap) {
  const GrandCanonical gc = solve_alpha(c, rho);
  CountDistribution d;
  d.volume = volume;
  d.rho = rho;
  d.kind = CountKind::grand_canonical_count;
  d.logp = log_count_prefix(c, gc, volume, cap);
  const double total = log_sum_exp(d.logp);
  const double missing = -std::expm1(total);
  if (missing > 1e-14)
    fail_argument("count_distribution: cap " + std::to_string(cap) + " too small, truncated mass " +
                  std::to_string(missing));
  normalize_log(d.logp);
  return d;
}

CanonicalTable::CanonicalTable(RateFunction c, int volume, std::int64_t N_max)
    : c_(std::move(c)), volume_(volume), N_max_(N_max) {
  if (volume < 1) fail_argument("canonical_table: volume must be >= 1");
  if (N_max < 0) fail_argument("canonical_table: N_max must be >= 0");
  const auto len = static_cast<std::size_t>(N_max + 1);
  std::vector<double> site(len);
  for (std::size_t k = 0; k < len; ++k) site[k] = -c_.log_factorial(static_cast<std::int64_t>(k));
  rows_.assign(static_cast<std::size_t>(volume) + 1, std::vector<double>(len, kNegInf));
  rows_[0][0] = 0.0;
  rows_[1] = site;
  for (int v = 2; v <= volume; ++v) rows_[v] = log_convolve(site, rows_[v - 1], len);
}

CanonicalTable canonical_table(const RateFunction& c, int volume, std::int64_t N_max) {
  return CanonicalTable(c, volume, N_max);
}

CountDistribution canonical_site_marginal(const CanonicalTable& table, std::int64_t N) {
  if (N < 0 || N > table.N_max()) fail_argument("canonical_site_marginal: N outside table");
  const int v = table.volume();
  CountDistribution d;
  d.volume = 1;
  d.N = N;
  d.kind = CountKind::canonical_split;
  d.logp.resize(static_cast<std::size_t>(N + 1));
  for (std::int64_t k = 0; k <= N; ++k)
    d.logp[k] = -table.rate().log_factorial(k) + table.logZ(v - 1, N - k) - table.logZ(v, N);
  const double z = log_sum_exp(d.logp);
  if (std::abs(z) > 1e-10) fail_numeric("canonical_site_marginal: normalization residual too large");
  normalize_log(d.logp);
  return d;
}

double verify_Z_ratio(const CanonicalTable& table, std::int64_t N) {
  if (N < 1 || N > table.N_max()) fail_argument("verify_Z_ratio: need 1 <= N <= N_max");
  const int v = table.volume();
  const double ratio = std::exp(table.logZ(v, N - 1) - table.logZ(v, N));
  const CountDistribution m = canonical_site_marginal(table, N);
  double expect = 0.0;
  for (std::int64_t k = 0; k <= N; ++k) expect += m.prob(k) * table.rate()(k);
  return std::abs(ratio - expect) / ratio;
}

double log_count_prob(const CanonicalTable& table, const GrandCanonical& gc, int v, std::int64_t n) {
  return static_cast<double>(n) * gc.log_alpha + table.logZ(v, n) - static_cast<double>(v) * gc.logZ;
}

}  // namespace zrp
