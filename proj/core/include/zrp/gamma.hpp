#pragma once

#include <cstdint>
#include <map>
#include <vector>

#include "zrp/measures.hpp"
#include "zrp/rates.hpp"

namespace zrp {

enum class GammaRoute { product_formula, recursion };

// Law of the particle count in a sub-volume of size v1 under the canonical
// measure on v1 + v2 sites with N particles.
struct GammaDistribution {
  std::int64_t N = 0;
  int v1 = 0;
  int v2 = 0;
  std::vector<double> logg;
  GammaRoute route = GammaRoute::product_formula;

  double prob(std::int64_t n) const;
  double log_prob(std::int64_t n) const;
};

GammaDistribution gamma_product(const RateFunction& c, int v1, int v2, std::int64_t N, double rho);
// Default density N / (v1 + v2).
GammaDistribution gamma_product(const RateFunction& c, int v1, int v2, std::int64_t N);

struct Split {
  int v1a = 1;  // |Lambda'_1|
  int v2a = 1;  // |Lambda'_2|
  int v1b = 1;  // |Lambda''_1|
  int v2b = 1;  // |Lambda''_2|
};
// Law of the count in Lambda' = Lambda'_1 u Lambda'_2 obtained by mixing the
// block-count law of Lambda_1 = Lambda'_1 u Lambda''_1 with the inner laws.
GammaDistribution gamma_recursive(const RateFunction& c, const Split& split, std::int64_t N);

// gamma from canonical partition functions: Z_{v1}^n Z_{v2}^{N-n} / Z_{v1+v2}^N.
GammaDistribution gamma_from_table(const CanonicalTable& table, int v1, int v2, std::int64_t N);

struct RatioDiagnostics {
  double A0_dec = 0.0;
  std::int64_t binding_dec = -1;
  double A0_ratio = 0.0;
  std::int64_t binding_ratio = -1;
};
RatioDiagnostics ratio_diagnostics(const GammaDistribution& g);

struct EnvelopeFit {
  double A0 = 0.0;
  std::int64_t binding_n = -1;
};
EnvelopeFit gaussian_envelope(const GammaDistribution& g);

// Memoized fugacities by density.
class FugacityCache {
 public:
  explicit FugacityCache(RateFunction c) : c_(std::move(c)) {}
  const GrandCanonical& at(double rho);
  const RateFunction& rate() const { return c_; }

 private:
  RateFunction c_;
  std::map<double, GrandCanonical> cache_;
};

// H(x) extended to real x in [0, N].
double regularization_potential(FugacityCache& fug, int v, std::int64_t N, double x);

struct RegularizedGamma {
  double epsilon = 0.125;
  std::int64_t N = 0;
  int v = 0;
  std::int64_t window_lo = 0;
  std::int64_t window_hi = -1;
  std::vector<double> H;  // H[n - window_lo]
  double logZeps = 0.0;
  std::vector<double> logg_tilde;
  std::int64_t Nbar = 0;

  double equivalence_constant(const GammaDistribution& g) const;
  bool in_window(std::int64_t n) const { return n >= window_lo && n <= window_hi; }
  double H_at(std::int64_t n) const { return H[static_cast<std::size_t>(n - window_lo)]; }
};

inline constexpr double kDefaultEpsilon = 0.125;

RegularizedGamma regularize(const GammaDistribution& g, double epsilon, FugacityCache& fug);
RegularizedGamma regularize(const GammaDistribution& g, double epsilon, const RateFunction& c);

struct TailReport {
  double A_upper = 0.0;  // ratio decay above Nbar
  std::int64_t binding_upper = -1;
  double A_lower = 0.0;  // mirrored below Nbar
  std::int64_t binding_lower = -1;
  double A_H = 0.0;  // increments of H on the window, both sides
  std::int64_t binding_H = -1;
  double max_tail_ratio = 0.0;  // largest decaying-side ratio outside the window
};
TailReport tail_monotonicity(const RegularizedGamma& rg);

struct DerivativeCheck {
  double max_residual = 0.0;
  double binding_x = 0.0;
};
DerivativeCheck H_derivative_check(const RateFunction& c, int v, std::int64_t N,
                                   const std::vector<double>& x_grid);

}  // namespace zrp
