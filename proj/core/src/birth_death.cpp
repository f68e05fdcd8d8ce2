#include "zrp/birth_death.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>

#include "zrp/error.hpp"
#include "zrp/numeric.hpp"

namespace zrp {

BirthDeathChain bd_from_log_gamma(const std::vector<double>& logg) {
  if (logg.size() < 2) fail_argument("bd_from_gamma: N must be >= 1");
  BirthDeathChain ch;
  ch.N = static_cast<std::int64_t>(logg.size()) - 1;
  ch.logg = logg;
  ch.Nbar = (ch.N + 1) / 2;
  ch.log_a.assign(logg.size(), kNegInf);
  ch.log_b.assign(logg.size(), kNegInf);
  for (std::int64_t n = 0; n < ch.N; ++n) ch.log_a[n] = std::min(logg[n + 1] - logg[n], 0.0);
  for (std::int64_t n = 1; n <= ch.N; ++n) ch.log_b[n] = std::min(logg[n - 1] - logg[n], 0.0);
  return ch;
}

double BirthDeathChain::reversibility_residual() const {
  double worst = 0.0;
  for (std::int64_t n = 0; n < N; ++n) worst = std::max(worst, std::abs((logg[n] + log_a[n]) - (logg[n + 1] + log_b[n + 1])));
  return worst;
}

std::vector<double> BirthDeathChain::apply(std::span<const double> phi) const {
  std::vector<double> out(static_cast<std::size_t>(N + 1), 0.0);
  for (std::int64_t n = 0; n <= N; ++n) {
    if (n < N) out[n] += std::exp(log_a[n]) * (phi[n + 1] - phi[n]);
    if (n > 0) out[n] += std::exp(log_b[n]) * (phi[n - 1] - phi[n]);
  }
  return out;
}

double bd_dirichlet(const BirthDeathChain& chain, std::span<const double> phi) {
  double s = 0.0;
  for (std::int64_t n = 1; n <= chain.N; ++n) {
    const double d = phi[n] - phi[n - 1];
    s += std::exp(std::min(chain.logg[n], chain.logg[n - 1])) * d * d;
  }
  return s;
}

double bd_quadratic(const BirthDeathChain& chain, std::span<const double> phi) {
  const std::vector<double> a = chain.apply(phi);
  double s = 0.0;
  for (std::int64_t n = 0; n <= chain.N; ++n) s -= std::exp(chain.logg[n]) * phi[n] * a[n];
  return s;
}

ReversibleForm reversible_form(const BirthDeathChain& chain) {
  ReversibleForm f;
  f.weight.resize(chain.logg.size());
  for (std::size_t n = 0; n < chain.logg.size(); ++n) f.weight[n] = std::exp(chain.logg[n]);
  for (std::int64_t n = 1; n <= chain.N; ++n)
    f.edges.push_back({n - 1, n, std::exp(std::min(chain.logg[n], chain.logg[n - 1]))});
  return f;
}

namespace {

// log(-log p) for p in (0, 1], given log p and log(1 - p).
double log_neg_log(double log_p, double log_q) {
  const double nl = log_p > -0.5 ? -std::log1p(-std::exp(log_q)) : -log_p;
  return nl > 0.0 ? std::log(nl) : kNegInf;
}

}  // namespace

CmrBound cmr_bound_log(const std::vector<double>& logg) {
  const auto N = static_cast<std::int64_t>(logg.size()) - 1;
  if (N < 1) fail_argument("cmr_bound: N must be >= 1");
  const std::int64_t nbar = (N + 1) / 2;
  // prefix[n] = log sum_{k<=n}, suffix[n] = log sum_{k>=n}
  std::vector<double> prefix(logg.size());
  std::vector<double> suffix(logg.size() + 1, kNegInf);
  double acc = kNegInf;
  for (std::int64_t n = 0; n <= N; ++n) prefix[n] = acc = log_add_exp(acc, logg[n]);
  acc = kNegInf;
  for (std::int64_t n = N; n >= 0; --n) suffix[n] = acc = log_add_exp(acc, logg[n]);
  CmrBound r;
  double best = kNegInf;
  // B0-: n in 0..nbar-1, sum_{k=n}^{nbar-1} 1/(g(k) ^ g(k+1)); accumulate from the top
  double inv = kNegInf;
  for (std::int64_t n = nbar - 1; n >= 0; --n) {
    inv = log_add_exp(inv, -std::min(logg[n], logg[n + 1]));
    const double term = prefix[n] + log_neg_log(prefix[n], suffix[n + 1]) + inv;
    if (term > best) {
      best = term;
      r.binding_minus = n;
    }
  }
  r.B0_minus = std::exp(best);
  best = kNegInf;
  inv = kNegInf;
  // B0+: n in nbar+1..N, sum_{k=nbar+1}^{n} 1/(g(k) ^ g(k-1))
  for (std::int64_t n = nbar + 1; n <= N; ++n) {
    inv = log_add_exp(inv, -std::min(logg[n], logg[n - 1]));
    const double term = suffix[n] + log_neg_log(suffix[n], prefix[n - 1]) + inv;
    if (term > best) {
      best = term;
      r.binding_plus = n;
    }
  }
  r.B0_plus = std::exp(best);
  r.B0 = std::max(r.B0_minus, r.B0_plus);
  return r;
}

double bd_spectral_gap(const BirthDeathChain& chain, std::vector<double>* eigenvector) {
  const auto n = static_cast<Eigen::Index>(chain.N + 1);
  Eigen::MatrixXd S = Eigen::MatrixXd::Zero(n, n);
  for (Eigen::Index k = 0; k + 1 < n; ++k) {
    const double up = std::exp(chain.log_a[k]);
    const double down = std::exp(chain.log_b[k + 1]);
    S(k, k) += up;
    S(k + 1, k + 1) += down;
    // symmetric off-diagonal: sqrt(a(k) b(k+1))
    const double off = -std::exp(0.5 * (chain.log_a[k] + chain.log_b[k + 1]));
    S(k, k + 1) = S(k + 1, k) = off;
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(S);
  if (es.info() != Eigen::Success) fail_numeric("bd_spectral_gap: eigensolver failed");
  if (eigenvector) {
    eigenvector->resize(static_cast<std::size_t>(n));
    for (Eigen::Index k = 0; k < n; ++k) (*eigenvector)[k] = es.eigenvectors()(k, 1) * std::exp(-0.5 * chain.logg[k]);
  }
  return es.eigenvalues()[1];
}

LsiResult bd_lsi_exact(const BirthDeathChain& chain, const LsiOptions& opt) {
  if (chain.N > 200) fail_argument("bd_lsi_exact: N must be <= 200");
  std::vector<double> fiedler;
  const double gap = bd_spectral_gap(chain, &fiedler);
  std::vector<double> coord(static_cast<std::size_t>(chain.N + 1));
  for (std::size_t k = 0; k < coord.size(); ++k) coord[k] = static_cast<double>(k);
  LsiResult r = maximize_entropy_ratio(reversible_form(chain), lsi_starts(fiedler, coord, opt), opt);
  r.two_over_gap = 2.0 / gap;
  return r;
}

DomResult compare_dom(const RateFunction& c, std::int64_t N) {
  if (N < 1) fail_argument("compare_dom: N must be >= 1");
  const GammaDistribution g = gamma_product(c, 1, 1, N);
  DomResult r;
  double best = kNegInf;
  for (std::int64_t n = 1; n <= N; ++n) {
    // N [g(n) ^ g(n-1)] <= B0 g(n) c(n)
    const double v = std::log(static_cast<double>(N)) + std::min(g.logg[n], g.logg[n - 1]) - g.logg[n] - std::log(c(n));
    if (v > best) {
      best = v;
      r.binding_n = n;
    }
    r.B0_closed = std::max(r.B0_closed, static_cast<double>(N) / std::max(c(n), c(N - n + 1)));
  }
  r.B0 = std::exp(best);
  return r;
}

}  // namespace zrp
