#pragma once

#include <cmath>
#include <cstddef>
#include <limits>
#include <span>
#include <vector>

namespace zrp {

inline constexpr double kNegInf = -std::numeric_limits<double>::infinity();

// log(exp(a) + exp(b)) without overflow; handles -inf.
inline double log_add_exp(double a, double b) {
  if (a < b) std::swap(a, b);
  if (b == kNegInf) return a;
  return a + std::log1p(std::exp(b - a));
}

double log_sum_exp(std::span<const double> x);

// Shift so that log_sum_exp(x) == 0. Returns the removed constant.
double normalize_log(std::vector<double>& x);

// c[n] = log sum_k exp(a[k] + b[n-k]) for n < out_len.
std::vector<double> log_convolve(std::span<const double> a, std::span<const double> b,
                                 std::size_t out_len);

// (1+d) log(1+d) - d, accurate for small |d|. Entropy density relative to the mean.
double entropy_kernel(double d);

// Ent_mu(f) for probability weights mu (summing to one) and f >= 0.
double entropy(std::span<const double> mu, std::span<const double> f);

double mean(std::span<const double> mu, std::span<const double> f);
double covariance(std::span<const double> mu, std::span<const double> f,
                  std::span<const double> g);

}  // namespace zrp
