#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "zrp/gamma.hpp"
#include "zrp/lsi.hpp"

namespace zrp {

// Metropolis chain on {0..N} reversible for gamma.
struct BirthDeathChain {
  std::int64_t N = 0;
  std::vector<double> logg;
  std::vector<double> log_a;  // up-rates, n = 0..N (a(N) = 0)
  std::vector<double> log_b;  // down-rates, n = 0..N (b(0) = 0)
  std::int64_t Nbar = 0;

  double reversibility_residual() const;
  // (A phi)(n)
  std::vector<double> apply(std::span<const double> phi) const;
};

BirthDeathChain bd_from_log_gamma(const std::vector<double>& logg);
inline BirthDeathChain bd_from_gamma(const GammaDistribution& g) { return bd_from_log_gamma(g.logg); }
inline BirthDeathChain bd_from_gamma(const RegularizedGamma& g) { return bd_from_log_gamma(g.logg_tilde); }

double bd_dirichlet(const BirthDeathChain& chain, std::span<const double> phi);
// <phi, -A phi> in L2(gamma)
double bd_quadratic(const BirthDeathChain& chain, std::span<const double> phi);

ReversibleForm reversible_form(const BirthDeathChain& chain);

struct CmrBound {
  double B0_minus = 0.0;
  std::int64_t binding_minus = -1;
  double B0_plus = 0.0;
  std::int64_t binding_plus = -1;
  double B0 = 0.0;
};
CmrBound cmr_bound_log(const std::vector<double>& logg);
inline CmrBound cmr_bound(const GammaDistribution& g) { return cmr_bound_log(g.logg); }
inline CmrBound cmr_bound(const RegularizedGamma& g) { return cmr_bound_log(g.logg_tilde); }

double bd_spectral_gap(const BirthDeathChain& chain, std::vector<double>* eigenvector = nullptr);

LsiResult bd_lsi_exact(const BirthDeathChain& chain, const LsiOptions& opt = {});

struct DomResult {
  double B0 = 0.0;         // from gamma coefficients
  double B0_closed = 0.0;  // max_n N / (c(n) v c(N-n+1))
  std::int64_t binding_n = -1;
};
DomResult compare_dom(const RateFunction& c, std::int64_t N);

}  // namespace zrp
