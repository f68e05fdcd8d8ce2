#pragma once

#include <cstdint>
#include <vector>

#include "zrp/rates.hpp"

namespace zrp {

// Single-site grand canonical law P(k) = alpha^k / (c(k)! Z(alpha)).
struct GrandCanonical {
  double rho = 0.0;
  double alpha = 0.0;
  double log_alpha = 0.0;
  double logZ = 0.0;
  double sigma2 = 0.0;
  std::int64_t trunc_K = 0;
  double tail_tol = 0.0;
  double mean_residual = 0.0;  // |mean - rho| / rho after solving

  double site_log_prob(const RateFunction& c, std::int64_t k) const;
};

// Moments of the single-site law at a given log fugacity.
struct SiteSeries {
  double logZ = 0.0;
  double mean = 0.0;
  double var = 0.0;
  std::int64_t K = 0;
};
SiteSeries site_series(const RateFunction& c, double log_alpha);

GrandCanonical solve_alpha(const RateFunction& c, double rho);

enum class CountKind { grand_canonical_count, canonical_split };

struct CountDistribution {
  int volume = 0;
  double rho = 0.0;     // grand canonical density
  std::int64_t N = -1;  // conditioning particle number, -1 if none
  std::vector<double> logp;
  CountKind kind = CountKind::grand_canonical_count;

  double prob(std::int64_t n) const;
  double mean() const;
};

// Unnormalized-free prefix: exact log p_v^rho(n) for n <= n_max.
std::vector<double> log_count_prefix(const RateFunction& c, const GrandCanonical& gc, int volume,
                                     std::int64_t n_max);

CountDistribution count_distribution(const RateFunction& c, double rho, int volume, std::int64_t cap);

class CanonicalTable {
 public:
  CanonicalTable() = default;
  CanonicalTable(RateFunction c, int volume, std::int64_t N_max);

  int volume() const { return volume_; }
  std::int64_t N_max() const { return N_max_; }
  // log Z over v sites with n particles; v = 0 is the empty volume.
  double logZ(int v, std::int64_t n) const { return rows_[v][n]; }
  const std::vector<double>& row(int v) const { return rows_[v]; }
  const RateFunction& rate() const { return c_; }

 private:
  RateFunction c_;
  int volume_ = 0;
  std::int64_t N_max_ = 0;
  std::vector<std::vector<double>> rows_;
};

CanonicalTable canonical_table(const RateFunction& c, int volume, std::int64_t N_max);

// Law of eta_x under the canonical measure on `table.volume()` sites with N particles.
CountDistribution canonical_site_marginal(const CanonicalTable& table, std::int64_t N);

double verify_Z_ratio(const CanonicalTable& table, std::int64_t N);

// log p_v^rho(n) through the canonical partition function: n log alpha + log Z_v^n - v log Z(alpha).
double log_count_prob(const CanonicalTable& table, const GrandCanonical& gc, int v, std::int64_t n);

}  // namespace zrp
