#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "oracles.hpp"
#include "zrp/generator.hpp"

using namespace zrp;

namespace {
const RateFunction kLinear = build_family(RateFamily::linear, {});
const RateFunction kParity = build_family(RateFamily::parity_perturbed, {0.5});
const RateFunction kScaled = build_family(RateFamily::scaled_linear, {2.0});

std::vector<double> random_vector(std::int64_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::vector<double> v(static_cast<std::size_t>(n));
  for (auto& x : v) x = u(rng);
  return v;
}
}  // namespace

TEST(Generator, DetailedBalanceAndKernels) {
  for (const auto& c : {kLinear, kParity, kScaled}) {
    for (int L = 1; L <= 4; ++L)
      for (int N : {0, 1, 5, 12}) {
        const SparseGenerator g(StateSpace(L, 1, N), c);
        EXPECT_LT(g.detailed_balance_residual(), 1e-12);
        EXPECT_LT(g.row_sum_residual(), 1e-12);
        EXPECT_LT(g.stationarity_residual(), 1e-12);
      }
    const SparseGenerator g2(StateSpace(2, 2, 8), c);
    EXPECT_LT(g2.detailed_balance_residual(), 1e-12);
  }
}

TEST(Generator, WeightsMatchEnumeration) {
  const SparseGenerator g(StateSpace(3, 1, 6), kParity);
  const auto& sp = g.space();
  const auto s = oracle::states(3, 6);
  const auto w = oracle::weights(oracle::parity_rate(0.5), s);
  for (std::size_t i = 0; i < s.size(); ++i) {
    std::vector<std::uint16_t> eta(s[i].begin(), s[i].end());
    EXPECT_NEAR(g.weights()[sp.rank(eta)], w[i], 1e-14);
  }
}

TEST(Generator, ExitRateCountsBoundary) {
  const SparseGenerator g(StateSpace(3, 1, 2), kLinear);
  const std::vector<std::uint16_t> mid{0, 2, 0};
  const std::vector<std::uint16_t> edge{2, 0, 0};
  EXPECT_DOUBLE_EQ(g.exit_rate(g.space().rank(mid)), 4.0);
  EXPECT_DOUBLE_EQ(g.exit_rate(g.space().rank(edge)), 2.0);
}

TEST(Dirichlet, TwoRoutesAgree) {
  const SparseGenerator g(StateSpace(3, 1, 5), kParity);
  const auto f = random_vector(g.size(), 1);
  const auto h = random_vector(g.size(), 2);
  EXPECT_NEAR(dirichlet(g, f, h), dirichlet_quadratic(g, f, h), 1e-12);
  std::vector<double> one(static_cast<std::size_t>(g.size()), 3.0);
  EXPECT_EQ(dirichlet(g, one, one), 0.0);
}

TEST(SpectralGap, IndependentWalkersOracle) {
  for (int N = 1; N <= 10; ++N) {
    const double gap = spectral_gap(SparseGenerator(StateSpace(2, 1, N), kLinear));
    EXPECT_NEAR(gap, 2.0, 1e-8) << N;
  }
  EXPECT_NEAR(spectral_gap(SparseGenerator(StateSpace(3, 1, 1), kLinear)), 1.0, 1e-8);
  EXPECT_NEAR(oracle::gap_independent_walkers(3), 1.0, 1e-15);
  for (int L = 2; L <= 5; ++L)
    EXPECT_NEAR(spectral_gap(SparseGenerator(StateSpace(L, 1, 3), kLinear)), oracle::gap_independent_walkers(L),
                1e-8);
}

TEST(SpectralGap, MatchesJacobiOracle) {
  for (auto [L, N] : {std::pair{2, 4}, std::pair{3, 3}, std::pair{4, 2}}) {
    const double ours = spectral_gap(SparseGenerator(StateSpace(L, 1, N), kParity));
    EXPECT_NEAR(ours, oracle::gap_dense(oracle::parity_rate(0.5), L, N), 1e-9);
  }
}

TEST(SpectralGap, ScalesLinearlyInLambda) {
  const double a = spectral_gap(SparseGenerator(StateSpace(3, 1, 4), kLinear));
  const double b = spectral_gap(SparseGenerator(StateSpace(3, 1, 4), kScaled));
  EXPECT_NEAR(b, 2.0 * a, 1e-9);
}

TEST(SpectralGap, LanczosAgreesWithDense) {
  const SparseGenerator g(StateSpace(4, 1, 9), kParity);  // 220 states
  GapOptions dense;
  GapOptions sparse;
  sparse.dense_limit = 10;
  const GapResult a = spectral_gap_full(g, dense);
  const GapResult b = spectral_gap_full(g, sparse);
  EXPECT_TRUE(a.dense);
  EXPECT_FALSE(b.dense);
  EXPECT_NEAR(a.gap, b.gap, 1e-8 * a.gap);
}

TEST(SpectralGap, EigenvectorIsAnEigenfunction) {
  const SparseGenerator g(StateSpace(3, 1, 5), kParity);
  const GapResult r = spectral_gap_full(g);
  const auto Lf = g.apply(r.eigenvector);
  double worst = 0.0;
  double norm = 0.0;
  for (std::size_t i = 0; i < Lf.size(); ++i) {
    worst = std::max(worst, std::abs(Lf[i] + r.gap * r.eigenvector[i]));
    norm += g.weights()[i] * r.eigenvector[i] * r.eigenvector[i];
  }
  EXPECT_LT(worst, 1e-8);
  EXPECT_NEAR(norm, 1.0, 1e-10);
}
