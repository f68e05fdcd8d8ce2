#include <gtest/gtest.h>

#include <cmath>

#include "oracles.hpp"
#include "zrp/error.hpp"
#include "zrp/gamma.hpp"
#include "zrp/numeric.hpp"

using namespace zrp;

namespace {
const RateFunction kLinear = build_family(RateFamily::linear, {});
const RateFunction kParity = build_family(RateFamily::parity_perturbed, {0.5});

double sup_diff(const GammaDistribution& g, const std::vector<double>& ref) {
  double w = 0.0;
  for (std::size_t n = 0; n < ref.size(); ++n) w = std::max(w, std::abs(g.prob(n) - ref[n]));
  return w;
}
}  // namespace

TEST(Gamma, LinearRateGivesBinomial) {
  for (auto [v1, v2] : {std::pair{1, 1}, std::pair{1, 3}, std::pair{4, 2}})
    for (int N : {1, 2, 7, 50, 200}) {
      const GammaDistribution g = gamma_product(kLinear, v1, v2, N);
      std::vector<double> ref(N + 1);
      for (int n = 0; n <= N; ++n) ref[n] = oracle::binomial_pmf(N, double(v1) / (v1 + v2), n);
      EXPECT_LT(sup_diff(g, ref), 1e-12) << v1 << "," << v2 << " N=" << N;
    }
}

TEST(Gamma, ProductFormulaMatchesEnumeration) {
  for (int N : {0, 1, 3, 6}) {
    const GammaDistribution g = gamma_product(kParity, 2, 3, N);
    EXPECT_LT(sup_diff(g, oracle::gamma_brute(oracle::parity_rate(0.5), 2, 3, N)), 1e-13);
  }
}

TEST(Gamma, DensityIndependent) {
  const GammaDistribution a = gamma_product(kParity, 3, 3, 40, 0.2);
  const GammaDistribution b = gamma_product(kParity, 3, 3, 40, 9.0);
  for (int n = 0; n <= 40; ++n) EXPECT_NEAR(a.logg[n], b.logg[n], 1e-10);
}

TEST(Gamma, TableRouteAgreesWithProductRoute) {
  const CanonicalTable t = canonical_table(kParity, 6, 30);
  const GammaDistribution a = gamma_from_table(t, 2, 4, 30);
  const GammaDistribution b = gamma_product(kParity, 2, 4, 30);
  for (int n = 0; n <= 30; ++n) EXPECT_NEAR(a.prob(n), b.prob(n), 1e-13);
}

TEST(Gamma, RecursionReproducesDirectLaw) {
  // count in Lambda'_1 u Lambda'_2 against the direct law on the same split
  const Split s{1, 2, 2, 1};
  for (int N : {1, 5, 12}) {
    const GammaDistribution r = gamma_recursive(kParity, s, N);
    const GammaDistribution d = gamma_product(kParity, s.v1a + s.v2a, s.v1b + s.v2b, N);
    EXPECT_EQ(r.route, GammaRoute::recursion);
    for (int n = 0; n <= N; ++n) EXPECT_NEAR(r.prob(n), d.prob(n), 1e-12);
  }
  EXPECT_THROW(gamma_recursive(kParity, Split{0, 1, 1, 1}, 3), Error);
}

TEST(Gamma, SymmetricForEqualVolumes) {
  const GammaDistribution g = gamma_product(kParity, 2, 2, 17);
  for (int n = 0; n <= 17; ++n) EXPECT_NEAR(g.logg[n], g.logg[17 - n], 1e-11);
}

TEST(GammaRatios, BinomialHalfHasUnitConstants) {
  const GammaDistribution g = gamma_product(kLinear, 3, 3, 25);
  const RatioDiagnostics d = ratio_diagnostics(g);
  EXPECT_NEAR(d.A0_dec, 1.0, 1e-10);
  EXPECT_NEAR(d.A0_ratio, 1.0, 1e-10);
}

TEST(GammaRatios, ParityConstantsFinite) {
  const RatioDiagnostics d = ratio_diagnostics(gamma_product(kParity, 1, 1, 100));
  EXPECT_TRUE(std::isfinite(d.A0_ratio));
  EXPECT_GT(d.A0_ratio, 1.0);
}

TEST(GaussianEnvelope, SingleParticleHasConstantTwo) {
  const EnvelopeFit f = gaussian_envelope(gamma_product(kLinear, 1, 1, 1));
  EXPECT_NEAR(f.A0, 2.0, 1e-9);
  EXPECT_EQ(f.binding_n, 1);
}

TEST(GaussianEnvelope, EnvelopeHoldsAtFittedConstant) {
  const GammaDistribution g = gamma_product(kParity, 2, 2, 60);
  const EnvelopeFit f = gaussian_envelope(g);
  const double nb = 30.0;
  for (int n = 0; n <= 60; ++n) {
    const double d2 = (n - nb) * (n - nb);
    const double A = f.A0 * (1 + 1e-9);
    EXPECT_LE(g.prob(n), A / std::sqrt(nb) * std::exp(-d2 / (A * nb)));
    EXPECT_GE(g.prob(n), 1.0 / (A * std::sqrt(nb)) * std::exp(-A * d2 / nb));
  }
}

TEST(Regularization, NormalizedAndUnchangedOutsideWindow) {
  const GammaDistribution g = gamma_product(kParity, 2, 2, 80);
  const RegularizedGamma rg = regularize(g, 0.125, kParity);
  EXPECT_EQ(rg.window_lo, 10);
  EXPECT_EQ(rg.window_hi, 70);
  EXPECT_NEAR(log_sum_exp(rg.logg_tilde), 0.0, 1e-12);
  for (int n = 0; n < 10; ++n) EXPECT_EQ(rg.logg_tilde[n], g.logg[n]);
  for (int n = 71; n <= 80; ++n) EXPECT_EQ(rg.logg_tilde[n], g.logg[n]);
  // the window mass of gamma and of gamma-tilde coincide
  double a = 0.0;
  double b = 0.0;
  for (int n = 10; n <= 70; ++n) {
    a += g.prob(n);
    b += std::exp(rg.logg_tilde[n]);
  }
  EXPECT_NEAR(a, b, 1e-12);
  EXPECT_LT(rg.equivalence_constant(g), 3.0);
}

TEST(Regularization, PotentialIsSymmetricAndVanishesForLinearAtCentre) {
  FugacityCache fug(kLinear);
  const int v = 3;
  const std::int64_t N = 40;
  for (double x : {5.0, 12.5, 20.0})
    EXPECT_NEAR(regularization_potential(fug, v, N, x), regularization_potential(fug, v, N, N - x), 1e-9);
  EXPECT_NEAR(regularization_potential(fug, v, N, 20.0), 0.0, 1e-9);
}

TEST(Regularization, LinearPotentialIsClosedForm) {
  // c(k) = k: part(y) = y log(y/v) - y, so H(x) = x log x + (N-x) log(N-x) - N log(N/2) for even N
  FugacityCache fug(kLinear);
  const int v = 2;
  const double N = 30.0;
  for (double x : {3.0, 10.0, 14.5}) {
    const double ref = x * std::log(x) + (N - x) * std::log(N - x) - N * std::log(N / 2.0);
    EXPECT_NEAR(regularization_potential(fug, v, 30, x), ref, 1e-8);
  }
}

TEST(Regularization, DerivativeMatchesFiniteDifference) {
  std::vector<double> xs;
  for (int k = 1; k < 40; ++k) xs.push_back(k * 2.0 + 0.37);
  const DerivativeCheck d = H_derivative_check(kParity, 2, 80, xs);
  EXPECT_LT(d.max_residual, 1e-5);
  EXPECT_THROW(H_derivative_check(kParity, 2, 80, {0.0}), Error);
}

TEST(Regularization, TailConstantsFinite) {
  const GammaDistribution g = gamma_product(kParity, 2, 2, 160);
  const TailReport t = tail_monotonicity(regularize(g, 0.125, kParity));
  EXPECT_TRUE(std::isfinite(t.A_upper));
  EXPECT_TRUE(std::isfinite(t.A_lower));
  EXPECT_TRUE(std::isfinite(t.A_H));
  EXPECT_LT(t.max_tail_ratio, 1.0);
}

TEST(Regularization, RejectsBadEpsilon) {
  const GammaDistribution g = gamma_product(kParity, 2, 2, 10);
  EXPECT_THROW(regularize(g, 0.25, kParity), Error);
  EXPECT_THROW(regularize(gamma_product(kParity, 1, 2, 10), 0.1, kParity), Error);
}
