#include <gtest/gtest.h>

#include <cmath>

#include "oracles.hpp"
#include "zrp/error.hpp"
#include "zrp/identities.hpp"
#include "zrp/numeric.hpp"

using namespace zrp;

namespace {
const RateFunction kLinear = build_family(RateFamily::linear, {});
const RateFunction kScaled = build_family(RateFamily::scaled_linear, {2.0});
const RateFunction kParity = build_family(RateFamily::parity_perturbed, {0.5});

std::vector<double> ones(const SplitSystem& s) { return std::vector<double>(static_cast<std::size_t>(s.size()), 1.0); }

// A fixed smooth function of the configuration, evaluated independently of indexing.
double probe(std::span<const std::uint16_t> eta) {
  double s = 0.0;
  for (std::size_t x = 0; x < eta.size(); ++x) s += (x + 1.0) * eta[x];
  return std::exp(std::sin(s));
}
}  // namespace

TEST(SplitSystem, TotalProbability) {
  for (const auto& c : {kLinear, kParity})
    for (int L : {1, 2, 3}) {
      const SplitSystem s(c, L, 7);
      EXPECT_LT(s.total_probability_residual(), 1e-12);
      double z = 0.0;
      for (int n = 0; n <= 7; ++n) z += s.gamma(n);
      EXPECT_NEAR(z, 1.0, 1e-14);
    }
}

TEST(SplitSystem, GammaMatchesEnumeration) {
  const SplitSystem s(kParity, 2, 6);
  const auto ref = oracle::gamma_brute(oracle::parity_rate(0.5), 2, 2, 6);
  for (int n = 0; n <= 6; ++n) EXPECT_NEAR(s.gamma(n), ref[n], 1e-14);
}

TEST(Reversibility, ConstantFunctionLinearRate) {
  const SplitSystem s(kLinear, 2, 5);
  const auto f = ones(s);
  for (int n = 1; n <= 5; ++n)
    for (int x = 0; x < 2; ++x)
      for (int y = 2; y < 4; ++y) EXPECT_LT(verify_reversibility(s, f, x, y, n).residual, 1e-13);
}

TEST(Reversibility, LeftSideMatchesEnumeration) {
  const SplitSystem s(kParity, 1, 2);
  std::vector<double> f(static_cast<std::size_t>(s.size()));
  for (std::int64_t i = 0; i < s.size(); ++i) f[i] = probe(s.space().state(i));
  const auto st = oracle::states(2, 2);
  const auto w = oracle::weights(oracle::parity_rate(0.5), st);
  for (int n = 1; n <= 2; ++n) {
    double num = 0.0;
    double den = 0.0;
    for (std::size_t i = 0; i < st.size(); ++i) {
      if (st[i][0] != n) continue;
      den += w[i];
      std::vector<std::uint16_t> eta(st[i].begin(), st[i].end());
      if (st[i][0] > 0) num += w[i] * probe(eta);
    }
    const ReversibilityCheck r = verify_reversibility(s, f, 0, 1, n);
    EXPECT_NEAR(r.lhs, num / den, 1e-13);
    EXPECT_LT(r.residual, 1e-12);
  }
}

TEST(Reversibility, SameBlockCase) {
  const SplitSystem s(kParity, 2, 6);
  const TestFunctionSet fs = TestFunctionSet::make(s.size(), 5, 11);
  for (const auto& f : fs.f)
    for (int n = 0; n <= 5; ++n) {
      EXPECT_LT(verify_reversibility(s, f, 2, 3, n).residual, 1e-12);
      EXPECT_LT(verify_reversibility(s, f, 3, 2, n).residual, 1e-12);
    }
  EXPECT_THROW(verify_reversibility(s, fs.f[0], 1, 1, 2), Error);
}

TEST(GradientRepresentation, LinearRateHasNoCovarianceTerm) {
  for (const auto& c : {kLinear, kScaled}) {
    const SplitSystem s(c, 2, 6);
    const TestFunctionSet fs = TestFunctionSet::make(s.size(), 10, 3);
    for (const auto& f : fs.f)
      for (int n = 1; n <= 6; ++n) {
        EXPECT_LT(std::abs(decompose_AB(s, f, n).B), 1e-12);
        const GradientCheck g = verify_gradient_representation(s, f, n);
        EXPECT_LT(std::abs(g.covariance_forward), 1e-12);
        EXPECT_LT(std::abs(g.covariance_backward), 1e-12);
      }
  }
}

TEST(GradientRepresentation, ConstantFunction) {
  const SplitSystem s(kParity, 2, 5);
  for (int n = 1; n <= 5; ++n) {
    const GradientCheck g = verify_gradient_representation(s, ones(s), n);
    EXPECT_NEAR(g.lhs, 0.0, 1e-15);
    EXPECT_NEAR(g.rhs_forward, 0.0, 1e-14);
    EXPECT_NEAR(g.rhs_backward, 0.0, 1e-14);
  }
}

TEST(GradientRepresentation, BothFormsOnRandomFunctions) {
  const SplitSystem s(kParity, 2, 8);
  const TestFunctionSet fs = TestFunctionSet::make(s.size(), 50, 2024);
  double worst = 0.0;
  for (const auto& f : fs.f)
    for (int n = 1; n <= 8; ++n) {
      const GradientCheck g = verify_gradient_representation(s, f, n);
      worst = std::max({worst, g.residual_forward, g.residual_backward});
    }
  EXPECT_LT(worst, 1e-10);
  EXPECT_THROW(verify_gradient_representation(s, fs.f[0], 0), Error);
}

TEST(DecomposeAB, BranchesAndSum) {
  const SplitSystem s(kParity, 1, 3);
  const TestFunctionSet fs = TestFunctionSet::make(s.size(), 4, 5);
  for (const auto& f : fs.f)
    for (int n = 1; n <= 3; ++n) {
      const ABSplit ab = decompose_AB(s, f, n);
      const GradientCheck g = verify_gradient_representation(s, f, n);
      EXPECT_EQ(ab.upper_branch, 2 * n >= 3);
      EXPECT_NEAR(ab.A + ab.B, g.lhs, 1e-12);
      EXPECT_LT(ab.residual, 1e-12);
    }
  const SplitSystem even(kParity, 1, 4);
  EXPECT_TRUE(decompose_AB(even, ones(even), 2).upper_branch);
  EXPECT_FALSE(decompose_AB(even, ones(even), 1).upper_branch);
}

TEST(ABound, FiniteAndStable) {
  const SplitSystem s(kLinear, 2, 6);
  const TestFunctionSet small = TestFunctionSet::make(s.size(), 25, 9);
  const TestFunctionSet big = TestFunctionSet::make(s.size(), 50, 9);
  const ABoundFit a = verify_A_bound(s, small.f);
  const ABoundFit b = verify_A_bound(s, big.f);
  EXPECT_TRUE(std::isfinite(a.C_all_edges));
  EXPECT_TRUE(std::isfinite(a.C_within));
  EXPECT_GT(a.C_all_edges, 0.0);
  EXPECT_GE(b.C_all_edges, a.C_all_edges);
  EXPECT_LE(b.C_all_edges, 2.0 * a.C_all_edges);
  const ABoundFit z = verify_A_bound(s, {ones(s)});
  EXPECT_EQ(z.C_all_edges, 0.0);
}

TEST(Tensorization, ConstantAndBlockMeasurable) {
  const SplitSystem s(kParity, 2, 6);
  const TensorizationCheck c = entropy_tensorization(s, ones(s));
  EXPECT_NEAR(c.entropy, 0.0, 1e-15);
  EXPECT_NEAR(c.conditional, 0.0, 1e-15);
  EXPECT_NEAR(c.projected, 0.0, 1e-15);
  std::vector<double> f(static_cast<std::size_t>(s.size()));
  for (std::int64_t i = 0; i < s.size(); ++i) f[i] = 1.0 + s.count_first(i) * s.count_first(i);
  const TensorizationCheck m = entropy_tensorization(s, f);
  EXPECT_NEAR(m.conditional, 0.0, 1e-14);
  EXPECT_LT(m.identity_residual, 1e-12);
}

TEST(Tensorization, RandomFunctions) {
  const SplitSystem s(kParity, 2, 6);
  const TestFunctionSet fs = TestFunctionSet::make(s.size(), 20, 77);
  for (const auto& f : fs.f) {
    const TensorizationCheck t = entropy_tensorization(s, f);
    EXPECT_LT(t.identity_residual, 1e-11);
    EXPECT_GE(t.inequality_gap, -1e-12);
    EXPECT_NEAR(t.entropy, oracle::entropy(s.weights(), f), 1e-12);
  }
}

TEST(EntropyInequality, Degenerate) {
  const std::vector<double> mu(4, 0.25);
  const std::vector<double> f{1.0, 2.0, 3.0, 0.5};
  const std::vector<double> g(4, 7.0);
  const EntropyInequality a = entropy_inequality(mu, f, g, 0.5);
  EXPECT_NEAR(a.slack, entropy(mu, f) / 0.5, 1e-14);
  const std::vector<double> flat(4, 2.0);
  const EntropyInequality b = entropy_inequality(mu, flat, f, 1.3);
  EXPECT_GE(b.slack, 0.0);
  EXPECT_THROW(entropy_inequality(mu, f, g, 0.0), Error);
}

TEST(EntropyInequality, RandomTwentyStates) {
  const TestFunctionSet fs = TestFunctionSet::make(20, 20, 5);
  const TestFunctionSet ws = TestFunctionSet::make(20, 1, 6);
  std::vector<double> mu = ws.f[0];
  double z = 0.0;
  for (double x : mu) z += x;
  for (auto& x : mu) x /= z;
  for (std::size_t k = 0; k + 1 < fs.size(); ++k) {
    std::vector<double> g = fs.f[k + 1];
    for (auto& x : g) x = std::log(x);
    for (double t : {0.01, 0.1, 1.0, 10.0}) {
      const EntropyInequality r = entropy_inequality(mu, fs.f[k], g, t);
      EXPECT_GE(r.slack, -1e-12);
      EXPECT_GE(r.slack_one_sided, -1e-12);
      EXPECT_GE(r.min_slack_grid, -1e-12);
    }
  }
}

TEST(Mgf, ZeroTimeAndFiniteness) {
  const MgfFit z = mgf_bounds(kLinear, 2, 1, 10, {0.0});
  EXPECT_EQ(z.A_c, 0.0);
  EXPECT_NEAR(z.A_h, 1.0, 1e-12);
  const MgfFit f = mgf_bounds(kLinear, 2, 1, 30, default_t_grid());
  EXPECT_TRUE(std::isfinite(f.A_c));
  EXPECT_GT(f.A_c, 0.0);
  EXPECT_TRUE(std::isfinite(f.A_h));
  EXPECT_THROW(mgf_bounds(kLinear, 2, 1, 10, {1.5}), Error);
}

TEST(Mgf, DisplayHoldsAtFittedConstant) {
  const MgfFit f = mgf_bounds(kParity, 3, 1, 12, default_t_grid());
  const CanonicalTable t = canonical_table(kParity, 3, 12);
  for (int N : {1, 6, 12}) {
    const CountDistribution m = canonical_site_marginal(t, N);
    double mc = 0.0;
    for (int k = 0; k <= N; ++k) mc += m.prob(k) * kParity(k);
    for (double s : default_t_grid()) {
      double e = 0.0;
      for (int k = 0; k <= N; ++k) e += m.prob(k) * std::exp(s * (kParity(k) - mc));
      EXPECT_LE(e, std::exp(f.A_c * N * s * s) * (1 + 1e-12));
    }
  }
}

TEST(Covariance, LinearRateIsDegenerate) {
  const CovarianceFit f = covariance_bounds(kScaled, 3, 1, 8, 10, 1);
  EXPECT_LT(f.max_abs_cov_c, 1e-12);
  EXPECT_LT(f.C_c, 1e-20);
  EXPECT_TRUE(std::isfinite(f.C_h));
}

TEST(Covariance, ParityFinite) {
  const CovarianceFit f = covariance_bounds(kParity, 2, 1, 20, 20, 1);
  EXPECT_TRUE(std::isfinite(f.C_c));
  EXPECT_GT(f.C_c, 0.0);
  EXPECT_TRUE(std::isfinite(f.C_h));
  EXPECT_GE(f.binding_N_c, 1);
}

TEST(Rothaus, HandValueAndRandom) {
  const std::vector<double> mu{0.5, 0.5};
  EXPECT_NEAR(rothaus_check(mu, std::vector<double>{3.0, 3.0}), 0.0, 1e-15);
  const double ent = 0.5 * 4.0 * std::log(4.0) - 2.5 * std::log(2.5);
  EXPECT_NEAR(rothaus_check(mu, std::vector<double>{1.0, 4.0}), 0.5 - ent, 1e-14);
  const TestFunctionSet fs = TestFunctionSet::make(50, 30, 8);
  const std::vector<double> u(50, 1.0 / 50);
  for (const auto& f : fs.f) EXPECT_GE(rothaus_check(u, f), -1e-12);
}

TEST(RatioConstant, Values) {
  EXPECT_NEAR(ratio_constant(gamma_product(kLinear, 2, 2, 30)).C, 1.0, 1e-10);
  EXPECT_NEAR(ratio_constant(gamma_product(kLinear, 1, 1, 1)).C, 1.0, 1e-12);
  const RatioFit r = ratio_constant(gamma_product(kParity, 1, 1, 100));
  EXPECT_TRUE(std::isfinite(r.C));
  EXPECT_GE(r.binding_n, 1);
}
