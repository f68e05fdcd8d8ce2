#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "zrp/gamma.hpp"
#include "zrp/rates.hpp"
#include "zrp/state_space.hpp"

namespace zrp {

// Two adjacent segments of L sites each (sites 0..L-1 form Lambda_1) with N
// particles, the canonical law on the union, and the block product structure
// of the law conditioned on the count in Lambda_1.
class SplitSystem {
 public:
  SplitSystem(RateFunction c, int L, int N);

  const RateFunction& rate() const { return c_; }
  int L() const { return L_; }
  int N() const { return N_; }
  const StateSpace& space() const { return space_; }
  std::int64_t size() const { return space_.size(); }
  const std::vector<double>& weights() const { return w_; }
  double gamma(int n) const { return gamma_[n]; }
  const std::vector<double>& gamma() const { return gamma_; }
  bool in_first(int x) const { return x < L_; }
  int count_first(std::int64_t i) const { return level_[i]; }
  const std::vector<std::int64_t>& level(int n) const { return by_level_[n]; }

  // Product structure at level n: block states and normalized block weights,
  // full index of (a, b) at index(n)[a * |B2| + b].
  const StateSpace& block1(int n) const { return blocks_[n].s1; }
  const StateSpace& block2(int n) const { return blocks_[n].s2; }
  const std::vector<double>& block1_weights(int n) const { return blocks_[n].w1; }
  const std::vector<double>& block2_weights(int n) const { return blocks_[n].w2; }
  const std::vector<std::int64_t>& index(int n) const { return blocks_[n].idx; }

  // max over states of |gamma(n) nu1(a) nu2(b) / nu(eta) - 1|
  double total_probability_residual() const;

  // nu[f | eta-bar_1 = n] and the conditional covariance.
  double cond_mean(std::span<const double> f, int n) const;
  double cond_cov(std::span<const double> f, std::span<const double> g, int n) const;
  double cond_entropy(std::span<const double> f, int n) const;
  // Zero-range Dirichlet form of sqrt-free g averaged under nu[. | n]; all
  // nearest-neighbour edges of the union, or only edges inside a block.
  double cond_dirichlet(std::span<const double> g, int n, bool within_blocks) const;

 private:
  struct Block {
    StateSpace s1;
    StateSpace s2;
    std::vector<double> w1;
    std::vector<double> w2;
    std::vector<std::int64_t> idx;
  };

  RateFunction c_;
  int L_ = 0;
  int N_ = 0;
  StateSpace space_;
  std::vector<double> w_;
  std::vector<double> gamma_;
  std::vector<int> level_;
  std::vector<std::vector<std::int64_t>> by_level_;
  std::vector<Block> blocks_;
};

// Strictly positive vectors with log-uniform entries in [e^-3, e^3].
struct TestFunctionSet {
  std::uint64_t seed = 0;
  std::vector<std::vector<double>> f;

  static TestFunctionSet make(std::int64_t states, int count, std::uint64_t seed);
  std::size_t size() const { return f.size(); }
};

// |a - b| / max(|a|, |b|, scale), 0 when everything vanishes.
double relative_residual(double a, double b, double scale = 0.0);

// nu[f 1(eta_x > 0) | n] against the transported expectation on the level
// reached by moving a particle from x to y.
struct ReversibilityCheck {
  double lhs = 0.0;
  double rhs = 0.0;
  double residual = 0.0;
};
ReversibilityCheck verify_reversibility(const SplitSystem& sys, std::span<const double> f, int x, int y, int n);

struct GradientCheck {
  double lhs = 0.0;   // nu[f|n] - nu[f|n-1]
  double rhs_forward = 0.0;  // forward representation
  double rhs_backward = 0.0; // representation through Lambda_2
  double transport_forward = 0.0;
  double covariance_forward = 0.0;
  double transport_backward = 0.0;
  double covariance_backward = 0.0;
  double coeff_forward = 0.0;
  double coeff_backward = 0.0;
  double residual_forward = 0.0;
  double residual_backward = 0.0;
};
// n in 1..N for both representations.
GradientCheck verify_gradient_representation(const SplitSystem& sys, std::span<const double> f, int n);

struct ABSplit {
  double A = 0.0;
  double B = 0.0;
  double gradient = 0.0;
  double residual = 0.0;
  bool upper_branch = true;  // 2n >= N
};
ABSplit decompose_AB(const SplitSystem& sys, std::span<const double> f, int n);

struct ABoundFit {
  double C_all_edges = 0.0;
  double C_within = 0.0;
  int binding_n = -1;
  int binding_f = -1;
  int binding_n_within = -1;
  int binding_f_within = -1;
};
// Smallest C with A(n)^2 <= C (L^2/N) (m_n v m_{n-1}) [(gamma(n-1)/gamma(n)) E_{n-1} + E_n]
// over n = 1..N and the given functions, E taken at sqrt(f).
ABoundFit verify_A_bound(const SplitSystem& sys, const std::vector<std::vector<double>>& fs);

struct TensorizationCheck {
  double entropy = 0.0;
  double conditional = 0.0;  // nu[Ent_{nu[.|n]}(f)]
  double projected = 0.0;    // Ent(nu[f | eta-bar_1])
  double identity_residual = 0.0;
  double block_sum = 0.0;      // nu[Ent_{nu_1}(f) + Ent_{nu_2}(f)]
  double inequality_gap = 0.0; // block_sum - conditional
};
TensorizationCheck entropy_tensorization(const SplitSystem& sys, std::span<const double> f);

struct EntropyInequality {
  double slack = 0.0;    // at the requested t
  double slack_one_sided = 0.0;
  double t_star = 0.0;   // minimizer of the right side over a log grid
  double rhs_min = 0.0;
  double min_slack_grid = 0.0;
};
// |mu[f,g]| <= (mu[f]/t) log(mgf(t) v mgf(-t)) + Ent(f)/t with centred g.
EntropyInequality entropy_inequality(std::span<const double> mu, std::span<const double> f,
                                     std::span<const double> g, double t);

struct MgfFit {
  double A_c = 0.0;
  std::int64_t binding_N_c = -1;
  double binding_t_c = 0.0;
  double A_h = 0.0;
  std::int64_t binding_N_h = -1;
  double binding_t_h = 0.0;
};
// Exact single-site expectations under the canonical law on `volume` sites.
MgfFit mgf_bounds(const RateFunction& c, int volume, std::int64_t N_lo, std::int64_t N_hi,
                  const std::vector<double>& t_grid);
std::vector<double> default_t_grid();

struct CovarianceFit {
  double C_c = 0.0;
  std::int64_t binding_N_c = -1;
  int binding_f_c = -1;
  double C_h = 0.0;
  std::int64_t binding_N_h = -1;
  int binding_f_h = -1;
  double max_abs_cov_c = 0.0;  // largest |nu[f, sum c]| seen
};
CovarianceFit covariance_bounds(const RateFunction& c, int volume, std::int64_t N_lo, std::int64_t N_hi,
                                int f_count, std::uint64_t seed);

// Ent(fbar) + 2 Var(sqrt f) - Ent(f), fbar = (sqrt f - mu[sqrt f])^2.
double rothaus_check(std::span<const double> mu, std::span<const double> f);

struct RatioFit {
  double C = 0.0;
  std::int64_t binding_n = -1;
};
RatioFit ratio_constant(const GammaDistribution& g);

}  // namespace zrp
