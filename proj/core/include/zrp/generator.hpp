#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "zrp/rates.hpp"
#include "zrp/state_space.hpp"

namespace zrp {

// Zero-range generator on the closed box: from eta, each site x jumps to each
// neighbour y at rate c(eta_x). Stored as CSR over distinct target states.
class SparseGenerator {
 public:
  SparseGenerator(StateSpace space, RateFunction c);

  const StateSpace& space() const { return space_; }
  const RateFunction& rate() const { return c_; }
  std::int64_t size() const { return space_.size(); }

  // Normalized stationary law, log and linear.
  const std::vector<double>& log_weights() const { return logw_; }
  const std::vector<double>& weights() const { return w_; }
  double logZ() const { return logZ_; }

  std::span<const std::int64_t> targets(std::int64_t i) const {
    return {col_.data() + row_[i], static_cast<std::size_t>(row_[i + 1] - row_[i])};
  }
  std::span<const double> rates(std::int64_t i) const {
    return {val_.data() + row_[i], static_cast<std::size_t>(row_[i + 1] - row_[i])};
  }
  double exit_rate(std::int64_t i) const { return exit_[i]; }

  // (Lf)(eta)
  std::vector<double> apply(std::span<const double> f) const;
  // max |row sum| and max |(nu L)_j| relative to the largest exit rate
  double row_sum_residual() const;
  double stationarity_residual() const;
  // max over listed transitions of |c(eta_x) nu(eta) / (c(eta_y + 1) nu(eta')) - 1|
  double detailed_balance_residual() const;

 private:
  StateSpace space_;
  RateFunction c_;
  std::vector<std::int64_t> row_;
  std::vector<std::int64_t> col_;
  std::vector<double> val_;
  std::vector<double> exit_;
  std::vector<double> logw_;
  std::vector<double> w_;
  double logZ_ = 0.0;
};

// (1/2) sum_x sum_{y~x} nu[c(eta_x) d_xy f d_xy g]
double dirichlet(const SparseGenerator& gen, std::span<const double> f, std::span<const double> g);
// -nu[f L g]
double dirichlet_quadratic(const SparseGenerator& gen, std::span<const double> f, std::span<const double> g);

double entropy_log(std::span<const double> log_weights, std::span<const double> f);

struct GapOptions {
  std::int64_t dense_limit = 3000;
  double tol = 1e-8;
  int max_restarts = 400;
};

struct GapResult {
  double gap = 0.0;
  std::vector<double> eigenvector;  // L2(nu) normalized, orthogonal to constants
  bool dense = true;
  double residual = 0.0;
  int iterations = 0;
};

GapResult spectral_gap_full(const SparseGenerator& gen, const GapOptions& opt = {});
inline double spectral_gap(const SparseGenerator& gen) { return spectral_gap_full(gen).gap; }

}  // namespace zrp
