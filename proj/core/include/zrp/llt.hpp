#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "zrp/rates.hpp"

namespace zrp {

enum class LLTRegime { poisson, gaussian_small_rho, gaussian_large_rho, central_value, tail_ratio };

std::string_view to_string(LLTRegime r);
LLTRegime parse_regime(std::string_view name);

// One grid cell: the sup over n of the regime's error, and its scaled value.
struct LLTPoint {
  int volume = 0;
  double param = 0.0;  // N, rho or N depending on the regime
  std::int64_t n = -1; // where the sup is attained
  double lhs = 0.0;
  double scaled = 0.0;
};

struct LLTReport {
  LLTRegime regime = LLTRegime::poisson;
  std::string grid;
  double constant = 0.0;  // max of `scaled` over the grid
  LLTPoint binding;
  double inf_value = 0.0;  // central_value only
  double sup_value = 0.0;
  std::vector<LLTPoint> cells;
};

// max over N <= N0, n <= N of |p_v^{N/v}(n) - N^n e^-N / n!|, times v, per volume.
LLTReport poisson_error(const RateFunction& c, std::int64_t N0, const std::vector<int>& volumes);

// sup_n |sqrt(s2 v) p(n) - phi((n - rho v)/sqrt(s2 v))| scaled by sqrt(s2 v)
// (small_rho) or sqrt(v) (large_rho). Cells with s2 v < 16 or v < 16 are skipped.
LLTReport gaussian_error(const RateFunction& c, const std::vector<double>& rhos, const std::vector<int>& volumes,
                         LLTRegime regime);

// sqrt(s2(N/v) v) p_v^{N/v}(N) over the grid.
LLTReport central_value(const RateFunction& c, const std::vector<int>& volumes, const std::vector<std::int64_t>& Ns);

// Smallest A0 with rho v / (A0 (n+1)) <= p(n+1)/p(n) <= A0 rho v / (n+1) for n in [n_lo, n_hi].
LLTReport tail_ratio(const RateFunction& c, double rho, int volume, std::int64_t n_lo, std::int64_t n_hi);

}  // namespace zrp
