#include "zrp/llt.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "zrp/error.hpp"
#include "zrp/gamma.hpp"
#include "zrp/measures.hpp"
#include "zrp/numeric.hpp"

namespace zrp {

std::string_view to_string(LLTRegime r) {
  switch (r) {
    case LLTRegime::poisson: return "poisson";
    case LLTRegime::gaussian_small_rho: return "gaussian_small_rho";
    case LLTRegime::gaussian_large_rho: return "gaussian_large_rho";
    case LLTRegime::central_value: return "central_value";
    case LLTRegime::tail_ratio: return "tail_ratio";
  }
  return "?";
}

LLTRegime parse_regime(std::string_view name) {
  for (auto r : {LLTRegime::poisson, LLTRegime::gaussian_small_rho, LLTRegime::gaussian_large_rho,
                 LLTRegime::central_value, LLTRegime::tail_ratio})
    if (to_string(r) == name) return r;
  fail_argument("unknown regime '" + std::string(name) + "'");
}

namespace {

void absorb(LLTReport& rep, const LLTPoint& p) {
  rep.cells.push_back(p);
  if (rep.cells.size() == 1 || p.scaled > rep.constant) {
    rep.constant = p.scaled;
    rep.binding = p;
  }
}

template <class T>
std::string join(const std::vector<T>& xs) {
  std::ostringstream os;
  for (std::size_t i = 0; i < xs.size(); ++i) os << (i ? "," : "") << xs[i];
  return os.str();
}

}  // namespace

LLTReport poisson_error(const RateFunction& c, std::int64_t N0, const std::vector<int>& volumes) {
  if (N0 < 1) fail_argument("poisson_error: N0 must be >= 1");
  LLTReport rep;
  rep.regime = LLTRegime::poisson;
  rep.grid = "N<=" + std::to_string(N0) + ";v=" + join(volumes);
  for (int v : volumes) {
    LLTPoint cell;
    cell.volume = v;
    for (std::int64_t N = 1; N <= N0; ++N) {
      const GrandCanonical gc = solve_alpha(c, static_cast<double>(N) / v);
      const std::vector<double> lp = log_count_prefix(c, gc, v, N);
      for (std::int64_t n = 0; n <= N; ++n) {
        const double pois =
            std::exp(static_cast<double>(n) * std::log(static_cast<double>(N)) - N - std::lgamma(n + 1.0));
        const double err = std::abs(std::exp(lp[n]) - pois);
        if (err > cell.lhs || cell.n < 0) {
          cell.lhs = err;
          cell.n = n;
          cell.param = static_cast<double>(N);
        }
      }
    }
    cell.scaled = cell.lhs * v;
    absorb(rep, cell);
  }
  return rep;
}

LLTReport gaussian_error(const RateFunction& c, const std::vector<double>& rhos, const std::vector<int>& volumes,
                         LLTRegime regime) {
  if (regime != LLTRegime::gaussian_small_rho && regime != LLTRegime::gaussian_large_rho)
    fail_argument("gaussian_error: regime must be gaussian_small_rho or gaussian_large_rho");
  LLTReport rep;
  rep.regime = regime;
  rep.grid = "rho=" + join(rhos) + ";v=" + join(volumes);
  const double inv_sqrt_2pi = 1.0 / std::sqrt(2.0 * std::numbers::pi);
  for (double rho : rhos) {
    const GrandCanonical gc = solve_alpha(c, rho);
    for (int v : volumes) {
      const double s2v = gc.sigma2 * v;
      if (regime == LLTRegime::gaussian_small_rho ? s2v < 16.0 : v < 16) continue;
      const double sd = std::sqrt(s2v);
      const double mu = rho * v;
      const auto cap = static_cast<std::int64_t>(std::ceil(mu + 12.0 * sd + 20.0));
      const std::vector<double> lp = log_count_prefix(c, gc, v, cap);
      if (-std::expm1(log_sum_exp(lp)) > 1e-12) fail_numeric("gaussian_error: truncated mass too large");
      LLTPoint cell;
      cell.volume = v;
      cell.param = rho;
      for (std::int64_t n = 0; n <= cap; ++n) {
        const double z = (static_cast<double>(n) - mu) / sd;
        const double err = std::abs(sd * std::exp(lp[n]) - inv_sqrt_2pi * std::exp(-0.5 * z * z));
        if (err > cell.lhs || cell.n < 0) {
          cell.lhs = err;
          cell.n = n;
        }
      }
      cell.scaled = cell.lhs * (regime == LLTRegime::gaussian_small_rho ? sd : std::sqrt(static_cast<double>(v)));
      absorb(rep, cell);
    }
  }
  if (rep.cells.empty()) fail_argument("gaussian_error: no grid cell passes the regime threshold");
  return rep;
}

LLTReport central_value(const RateFunction& c, const std::vector<int>& volumes, const std::vector<std::int64_t>& Ns) {
  if (volumes.empty() || Ns.empty()) fail_argument("central_value: empty grid");
  const int vmax = *std::max_element(volumes.begin(), volumes.end());
  const std::int64_t Nmax = *std::max_element(Ns.begin(), Ns.end());
  if (*std::min_element(volumes.begin(), volumes.end()) < 1 || *std::min_element(Ns.begin(), Ns.end()) < 1)
    fail_argument("central_value: v and N must be >= 1");
  const CanonicalTable table = canonical_table(c, vmax, Nmax);
  FugacityCache fug(c);
  LLTReport rep;
  rep.regime = LLTRegime::central_value;
  rep.grid = "v=" + join(volumes) + ";N=" + join(Ns);
  rep.inf_value = std::numeric_limits<double>::infinity();
  rep.sup_value = 0.0;
  for (int v : volumes)
    for (std::int64_t N : Ns) {
      const GrandCanonical& gc = fug.at(static_cast<double>(N) / v);
      LLTPoint cell;
      cell.volume = v;
      cell.param = static_cast<double>(N);
      cell.n = N;
      cell.lhs = std::sqrt(gc.sigma2 * v) * std::exp(log_count_prob(table, gc, v, N));
      cell.scaled = cell.lhs;
      rep.inf_value = std::min(rep.inf_value, cell.lhs);
      rep.sup_value = std::max(rep.sup_value, cell.lhs);
      absorb(rep, cell);
    }
  rep.constant = rep.sup_value / rep.inf_value;
  return rep;
}

LLTReport tail_ratio(const RateFunction& c, double rho, int volume, std::int64_t n_lo, std::int64_t n_hi) {
  if (n_lo < 1 || n_hi < n_lo) fail_argument("tail_ratio: need 1 <= n_lo <= n_hi");
  const CanonicalTable table = canonical_table(c, volume, n_hi + 1);
  const GrandCanonical gc = solve_alpha(c, rho);
  LLTReport rep;
  rep.regime = LLTRegime::tail_ratio;
  rep.grid = "rho=" + std::to_string(rho) + ";v=" + std::to_string(volume) + ";n=" + std::to_string(n_lo) + ".." +
             std::to_string(n_hi);
  const double lrv = std::log(rho * volume);
  LLTPoint best;
  best.volume = volume;
  best.param = rho;
  for (std::int64_t n = n_lo; n <= n_hi; ++n) {
    const double lr = gc.log_alpha + table.logZ(volume, n + 1) - table.logZ(volume, n);
    const double dev = std::abs(lr + std::log(static_cast<double>(n + 1)) - lrv);
    if (best.n < 0 || dev > best.lhs) {
      best.lhs = dev;
      best.n = n;
    }
  }
  best.scaled = std::exp(best.lhs);
  best.lhs = best.scaled;
  absorb(rep, best);
  return rep;
}

}  // namespace zrp
