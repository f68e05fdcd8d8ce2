#include "zrp/numeric.hpp"

#include <algorithm>

#include "zrp/error.hpp"

namespace zrp {

double log_sum_exp(std::span<const double> x) {
  double m = kNegInf;
  for (double v : x) m = std::max(m, v);
  if (m == kNegInf) return kNegInf;
  if (std::isinf(m)) return m;
  double s = 0.0;
  for (double v : x) s += std::exp(v - m);
  return m + std::log(s);
}

double normalize_log(std::vector<double>& x) {
  const double z = log_sum_exp(x);
  if (!std::isfinite(z)) fail_numeric("cannot normalize: total mass is zero or infinite");
  for (double& v : x) v -= z;
  return z;
}

std::vector<double> log_convolve(std::span<const double> a, std::span<const double> b,
                                 std::size_t out_len) {
  std::vector<double> out(out_len, kNegInf);
  for (std::size_t n = 0; n < out_len; ++n) {
    const std::size_t k_lo = n >= b.size() ? n - b.size() + 1 : 0;
    const std::size_t k_hi = std::min(n, a.size() - 1);
    if (a.empty() || k_lo > k_hi) continue;
    double m = kNegInf;
    for (std::size_t k = k_lo; k <= k_hi; ++k) m = std::max(m, a[k] + b[n - k]);
    if (m == kNegInf) continue;
    double s = 0.0;
    for (std::size_t k = k_lo; k <= k_hi; ++k) s += std::exp(a[k] + b[n - k] - m);
    out[n] = m + std::log(s);
  }
  return out;
}

double entropy_kernel(double d) {
  if (std::abs(d) < 0.05) {
    // sum_{k>=2} (-1)^k d^k / (k(k-1))
    double term = d * d;
    double s = 0.0;
    for (int k = 2; k < 40; ++k) {
      const double t = term / (static_cast<double>(k) * (k - 1));
      s += (k % 2 == 0) ? t : -t;
      if (std::abs(t) < 1e-18 * std::abs(s)) break;
      term *= d;
    }
    return s;
  }
  if (d == -1.0) return 1.0;
  return (1.0 + d) * std::log1p(d) - d;
}

double mean(std::span<const double> mu, std::span<const double> f) {
  double s = 0.0;
  for (std::size_t i = 0; i < mu.size(); ++i) s += mu[i] * f[i];
  return s;
}

double covariance(std::span<const double> mu, std::span<const double> f,
                  std::span<const double> g) {
  const double mf = mean(mu, f);
  const double mg = mean(mu, g);
  double s = 0.0;
  for (std::size_t i = 0; i < mu.size(); ++i) s += mu[i] * (f[i] - mf) * (g[i] - mg);
  return s;
}

double entropy(std::span<const double> mu, std::span<const double> f) {
  double m = 0.0;
  for (std::size_t i = 0; i < mu.size(); ++i) {
    if (f[i] < 0.0 || !std::isfinite(f[i])) fail_argument("entropy: f must be finite and nonnegative");
    m += mu[i] * f[i];
  }
  if (m <= 0.0) return 0.0;
  // Ent(f) = m * sum mu * phi(f/m - 1), with phi(d) = (1+d)log(1+d) - d.
  double s = 0.0;
  for (std::size_t i = 0; i < mu.size(); ++i) {
    if (mu[i] == 0.0) continue;
    s += mu[i] * entropy_kernel(f[i] / m - 1.0);
  }
  return m * s;
}

}  // namespace zrp
