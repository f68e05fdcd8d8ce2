#include "zrp/simulate.hpp"

#include <algorithm>
#include <bit>
#include <boost/math/distributions/chi_squared.hpp>
#include <cmath>
#include <cstring>
#include <ostream>
#include <random>
#include <sstream>

#include "zrp/error.hpp"
#include "zrp/state_space.hpp"

namespace zrp {

namespace {

double uniform01(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

// Binary sum tree over site rates; internal nodes are recomputed from their
// children on every update so no rounding accumulates.
class SumTree {
 public:
  explicit SumTree(int n) : P_(static_cast<int>(std::bit_ceil(static_cast<unsigned>(std::max(n, 1))))), t_(2 * P_, 0.0) {}

  void set(int x, double r) {
    int i = P_ + x;
    t_[i] = r;
    for (i /= 2; i >= 1; i /= 2) t_[i] = t_[2 * i] + t_[2 * i + 1];
  }
  double total() const { return t_[1]; }

  int find(double u) const {
    int i = 1;
    while (i < P_) {
      const double l = t_[2 * i];
      bool left = u < l;
      if (left && l == 0.0) left = false;
      if (!left && t_[2 * i + 1] == 0.0) left = true;
      if (left) {
        i = 2 * i;
      } else {
        u -= l;
        i = 2 * i + 1;
      }
    }
    return i - P_;
  }

 private:
  int P_;
  std::vector<double> t_;
};

template <class T>
void put(std::ostream& os, T v) {
  unsigned char b[sizeof(T)];
  std::memcpy(b, &v, sizeof(T));
  if constexpr (std::endian::native == std::endian::big) std::reverse(b, b + sizeof(T));
  os.write(reinterpret_cast<const char*>(b), sizeof(T));
}

}  // namespace

Trajectory run(const SimConfig& cfg) {
  if (cfg.L < 1 || cfg.d < 1) fail_argument("simulate: L and d must be >= 1");
  if (cfg.N < 0 || cfg.N > 65535) fail_argument("simulate: N must be in [0, 65535]");
  if (cfg.events < 0) fail_argument("simulate: event budget must be >= 0");
  const auto nbr = lattice_neighbors(cfg.L, cfg.d);
  const int sites = static_cast<int>(nbr.size());

  Trajectory tr;
  tr.L = cfg.L;
  tr.d = cfg.d;
  tr.N = cfg.N;
  tr.sites = sites;
  tr.initial.assign(static_cast<std::size_t>(sites), 0);
  for (int k = 0; k < cfg.N; ++k) ++tr.initial[cfg.initial == InitialState::packed ? 0 : k % sites];
  std::vector<std::uint16_t> eta = tr.initial;

  const RateFunction& c = cfg.rate;
  SumTree tree(sites);
  auto site_rate = [&](int x) { return c(eta[x]) * static_cast<double>(nbr[x].size()); };
  for (int x = 0; x < sites; ++x) tree.set(x, site_rate(x));

  std::mt19937_64 rng(cfg.seed);
  double t = 0.0;
  const bool timed = cfg.horizon > 0.0;
  if (!timed) tr.events.reserve(static_cast<std::size_t>(cfg.events));
  while (timed || static_cast<std::int64_t>(tr.events.size()) < cfg.events) {
    const double R = tree.total();
    if (!(R > 0.0)) {
      if (timed) t = cfg.horizon;
      break;
    }
    t += -std::log1p(-uniform01(rng)) / R;
    if (timed && t > cfg.horizon) {
      t = cfg.horizon;
      break;
    }
    const int x = tree.find(uniform01(rng) * R);
    const auto& nx = nbr[x];
    const int y = nx[std::min(nx.size() - 1, static_cast<std::size_t>(uniform01(rng) * nx.size()))];
    if (eta[x] == 0) fail_numeric("simulate: selected an empty site");
    --eta[x];
    ++eta[y];
    tree.set(x, site_rate(x));
    tree.set(y, site_rate(y));
    tr.events.push_back({t, x, y});
  }
  tr.final_time = t;
  return tr;
}

void Trajectory::write_binary(std::ostream& os) const {
  put<std::int32_t>(os, L);
  put<std::int32_t>(os, d);
  put<std::int32_t>(os, N);
  put<std::int32_t>(os, sites);
  put<std::uint64_t>(os, events.size());
  for (auto v : initial) put<std::uint16_t>(os, v);
  for (const auto& e : events) {
    put<double>(os, e.time);
    put<std::int32_t>(os, e.from);
    put<std::int32_t>(os, e.to);
  }
  put<double>(os, final_time);
}

std::uint64_t Trajectory::digest() const {
  std::ostringstream os;
  write_binary(os);
  std::uint64_t h = 14695981039346656037ULL;
  for (unsigned char ch : os.str()) {
    h ^= ch;
    h *= 1099511628211ULL;
  }
  return h;
}

void replay(const Trajectory& traj, double t0, double dt,
            const std::function<void(double, std::span<const std::uint16_t>)>& visit) {
  if (!(dt > 0.0)) fail_argument("replay: dt must be positive");
  std::vector<std::uint16_t> eta = traj.initial;
  std::size_t e = 0;
  for (std::int64_t k = 0;; ++k) {
    const double t = t0 + static_cast<double>(k) * dt;
    if (t > traj.final_time) break;
    while (e < traj.events.size() && traj.events[e].time <= t) {
      --eta[traj.events[e].from];
      ++eta[traj.events[e].to];
      ++e;
    }
    visit(t, eta);
  }
}

std::vector<double> occupation_histogram(const Trajectory& traj, int site, double t0) {
  if (site < 0 || site >= traj.sites) fail_argument("occupation_histogram: bad site");
  std::vector<double> h(static_cast<std::size_t>(traj.N + 1), 0.0);
  int occ = traj.initial[site];
  double last = 0.0;
  for (const auto& e : traj.events) {
    if (e.from != site && e.to != site) continue;
    if (e.time > t0) h[occ] += e.time - std::max(last, t0);
    last = e.time;
    occ += (e.to == site) - (e.from == site);
  }
  if (traj.final_time > t0) h[occ] += traj.final_time - std::max(last, t0);
  return h;
}

StationarityResult stationarity_test(const Trajectory& traj, const CountDistribution& exact_marginal,
                                     const StationarityOptions& opt) {
  if (opt.site < 0 || opt.site >= traj.sites) fail_argument("stationarity_test: bad site");
  StationarityResult r;
  r.burn_in = opt.burn_in >= 0.0 ? opt.burn_in : (opt.gap > 0.0 ? 10.0 / opt.gap : 0.1 * traj.final_time);
  r.thin = opt.thin > 0.0 ? opt.thin : (opt.gap > 0.0 ? 5.0 / opt.gap : (traj.final_time - r.burn_in) / 1000.0);
  if (!(r.thin > 0.0) || r.burn_in >= traj.final_time) fail_argument("stationarity_test: insufficient samples");
  std::vector<std::int64_t> counts(static_cast<std::size_t>(traj.N + 1), 0);
  replay(traj, r.burn_in, r.thin, [&](double, std::span<const std::uint16_t> eta) {
    ++counts[eta[opt.site]];
    ++r.samples;
  });
  if (r.samples < opt.min_samples) fail_argument("stationarity_test: insufficient samples");

  const auto n = static_cast<double>(r.samples);
  std::vector<double> obs;
  std::vector<double> expd;
  double o = 0.0;
  double e = 0.0;
  for (int k = 0; k <= traj.N; ++k) {
    o += static_cast<double>(counts[k]);
    e += n * exact_marginal.prob(k);
    if (e >= 5.0) {
      obs.push_back(o);
      expd.push_back(e);
      o = e = 0.0;
    }
  }
  if (e > 0.0 || o > 0.0) {
    if (expd.empty()) {
      obs.push_back(o);
      expd.push_back(e);
    } else {
      obs.back() += o;
      expd.back() += e;
    }
  }
  if (expd.size() < 2) fail_argument("stationarity_test: fewer than two bins after merging");
  for (std::size_t k = 0; k < obs.size(); ++k) r.chi2 += (obs[k] - expd[k]) * (obs[k] - expd[k]) / expd[k];
  r.dof = static_cast<int>(obs.size()) - 1;
  const boost::math::chi_squared dist(r.dof);
  r.pvalue = boost::math::cdf(boost::math::complement(dist, r.chi2));
  return r;
}

RelaxationResult relaxation_estimate(const Trajectory& traj,
                                     const std::function<double(std::span<const std::uint16_t>)>& observable,
                                     const RelaxationOptions& opt) {
  const double span = traj.final_time - opt.burn_in;
  if (!(span > 0.0)) fail_argument("relaxation_estimate: no stationary segment");
  RelaxationResult r;
  r.dt = opt.dt > 0.0 ? opt.dt : span / 1048576.0;
  std::vector<double> x;
  replay(traj, opt.burn_in, r.dt, [&](double, std::span<const std::uint16_t> eta) { x.push_back(observable(eta)); });
  const std::size_t n = x.size();
  if (n < 16) fail_argument("relaxation_estimate: too few samples");
  double m = 0.0;
  for (double v : x) m += v;
  m /= static_cast<double>(n);
  double var = 0.0;
  for (auto& v : x) {
    v -= m;
    var += v * v;
  }
  var /= static_cast<double>(n);
  if (!(var > 1e-300)) fail_numeric("relaxation_estimate: flat autocorrelation");

  std::vector<double> lags;
  std::vector<double> logc;
  const std::size_t max_lag = std::min<std::size_t>(n / 10, 4000);
  for (std::size_t j = 1; j <= max_lag; ++j) {
    double s = 0.0;
    for (std::size_t i = 0; i + j < n; ++i) s += x[i] * x[i + j];
    const double cj = s / static_cast<double>(n - j) / var;
    if (cj < opt.min_correlation) break;
    lags.push_back(static_cast<double>(j) * r.dt);
    logc.push_back(std::log(cj));
  }
  if (lags.empty()) fail_numeric("relaxation_estimate: correlation decays within one step; reduce dt");
  if (lags.size() == max_lag) fail_numeric("relaxation_estimate: correlation does not decay; increase dt");
  r.lags_used = static_cast<int>(lags.size());
  if (lags.size() == 1) {
    r.rate = -logc[0] / lags[0];
    return r;
  }
  double mt = 0.0;
  double ml = 0.0;
  for (std::size_t k = 0; k < lags.size(); ++k) {
    mt += lags[k];
    ml += logc[k];
  }
  mt /= static_cast<double>(lags.size());
  ml /= static_cast<double>(lags.size());
  double sxy = 0.0;
  double sxx = 0.0;
  for (std::size_t k = 0; k < lags.size(); ++k) {
    sxy += (lags[k] - mt) * (logc[k] - ml);
    sxx += (lags[k] - mt) * (lags[k] - mt);
  }
  r.rate = -sxy / sxx;
  return r;
}

}  // namespace zrp
