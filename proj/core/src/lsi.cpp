#include "zrp/lsi.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <random>

#include "zrp/error.hpp"
#include "zrp/numeric.hpp"

namespace zrp {

ReversibleForm reversible_form(const SparseGenerator& gen) {
  ReversibleForm f;
  f.weight = gen.weights();
  for (std::int64_t i = 0; i < gen.size(); ++i) {
    const auto t = gen.targets(i);
    const auto r = gen.rates(i);
    for (std::size_t k = 0; k < t.size(); ++k)
      if (t[k] > i) f.edges.push_back({i, t[k], f.weight[i] * r[k]});
  }
  return f;
}

double energy(const ReversibleForm& form, std::span<const double> g) {
  double s = 0.0;
  for (const auto& e : form.edges) {
    const double d = g[e.i] - g[e.j];
    s += e.w * d * d;
  }
  return s;
}

namespace {

// Ratio and gradient in log coordinates u = log g, shifted so that nu[g^2] = 1.
class Objective {
 public:
  explicit Objective(const ReversibleForm& form) : form_(form) {
    for (double w : form.weight) logw_.push_back(w > 0.0 ? std::log(w) : kNegInf);
  }

  void normalize(std::vector<double>& u) const {
    std::vector<double> t(u.size());
    for (std::size_t i = 0; i < u.size(); ++i) t[i] = logw_[i] + 2.0 * u[i];
    const double lm = log_sum_exp(t);
    for (double& v : u) v -= 0.5 * lm;
  }

  // Returns ratio; fills grad if non-null. Works with t = u - nu[u], so that
  // Ent(g^2) = sum w phi(e^{2t}) - phi(nu[e^{2t}]) keeps relative accuracy
  // when g is close to a constant.
  double eval(const std::vector<double>& u, std::vector<double>* grad, double* out_E = nullptr) const {
    const std::size_t n = u.size();
    double ubar = 0.0;
    for (std::size_t i = 0; i < n; ++i)
      if (form_.weight[i] > 0.0) ubar += form_.weight[i] * u[i];
    std::vector<double> t(n);
    for (std::size_t i = 0; i < n; ++i) t[i] = u[i] - ubar;
    double phi_sum = 0.0;
    double delta = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      if (form_.weight[i] == 0.0) continue;
      const double d = std::expm1(2.0 * t[i]);
      phi_sum += form_.weight[i] * entropy_kernel(d);
      delta += form_.weight[i] * d;
    }
    const double ent = std::max(0.0, phi_sum - entropy_kernel(delta));
    double E = 0.0;
    for (const auto& e : form_.edges) {
      const double d = std::exp(t[e.j]) * std::expm1(t[e.i] - t[e.j]);
      E += e.w * d * d;
    }
    if (out_E) *out_E = E * std::exp(2.0 * ubar);
    if (!(E > 0.0)) {
      if (grad) grad->assign(n, 0.0);
      return 0.0;
    }
    const double R = ent / E;
    if (grad) {
      grad->assign(n, 0.0);
      const double logM = std::log1p(delta);
      for (std::size_t i = 0; i < n; ++i)
        (*grad)[i] = 2.0 * form_.weight[i] * std::exp(2.0 * t[i]) * (2.0 * t[i] - logM);
      for (const auto& e : form_.edges) {
        const double gi = std::exp(t[e.i]);
        const double gj = std::exp(t[e.j]);
        const double d = gj * std::expm1(t[e.i] - t[e.j]);
        (*grad)[e.i] -= R * 2.0 * e.w * d * gi;
        (*grad)[e.j] += R * 2.0 * e.w * d * gj;
      }
      for (double& v : *grad) v /= E;
    }
    return R;
  }

 private:
  const ReversibleForm& form_;
  std::vector<double> logw_;
};

double dot(const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

struct AscentResult {
  double ratio = 0.0;
  std::vector<double> u;
  bool converged = false;
};

// L-BFGS ascent with backtracking (halving) line search.
AscentResult ascend(const Objective& obj, std::vector<double> u, const LsiOptions& opt) {
  obj.normalize(u);
  std::vector<double> grad;
  double R = obj.eval(u, &grad);
  AscentResult best{R, u, false};
  std::deque<std::pair<std::vector<double>, std::vector<double>>> mem;  // (s, y) in ascent form
  const std::size_t kMem = 8;
  const std::size_t n = u.size();
  std::vector<double> dir(n);
  std::vector<double> trial(n);
  std::vector<double> gtrial;
  bool first = true;
  int quiet = 0;
  for (int step = 0; step < opt.max_steps; ++step) {
    // two-loop recursion on -R
    std::vector<double> q(n);
    for (std::size_t i = 0; i < n; ++i) q[i] = -grad[i];
    std::vector<double> alpha(mem.size());
    for (std::size_t k = mem.size(); k-- > 0;) {
      const auto& [s, y] = mem[k];
      alpha[k] = dot(s, q) / dot(y, s);
      for (std::size_t i = 0; i < n; ++i) q[i] -= alpha[k] * y[i];
    }
    double gamma0 = 1.0;
    if (!mem.empty()) gamma0 = dot(mem.back().first, mem.back().second) / dot(mem.back().second, mem.back().second);
    for (double& v : q) v *= gamma0;
    for (std::size_t k = 0; k < mem.size(); ++k) {
      const auto& [s, y] = mem[k];
      const double beta = dot(y, q) / dot(y, s);
      for (std::size_t i = 0; i < n; ++i) q[i] += s[i] * (alpha[k] - beta);
    }
    for (std::size_t i = 0; i < n; ++i) dir[i] = -q[i];
    double slope = dot(grad, dir);
    if (!(slope > 0.0)) {
      mem.clear();
      dir = grad;
      slope = dot(grad, dir);
      first = true;
    }
    if (!(slope > 0.0)) {
      best.converged = true;
      break;
    }
    double t = 1.0;
    if (first) {
      double gmax = 0.0;
      for (double v : dir) gmax = std::max(gmax, std::abs(v));
      t = gmax > 0.0 ? 0.1 / gmax : 1.0;
    }
    bool accepted = false;
    double Rt = R;
    for (int h = 0; h < 60; ++h, t *= 0.5) {
      for (std::size_t i = 0; i < n; ++i) trial[i] = u[i] + t * dir[i];
      obj.normalize(trial);
      Rt = obj.eval(trial, &gtrial);
      if (std::isfinite(Rt) && Rt >= R + 1e-4 * t * slope) {
        accepted = true;
        break;
      }
    }
    if (!accepted) {
      best.converged = true;
      break;
    }
    std::vector<double> s(n);
    std::vector<double> y(n);
    for (std::size_t i = 0; i < n; ++i) {
      s[i] = trial[i] - u[i];
      y[i] = grad[i] - gtrial[i];  // gradient of -R
    }
    if (dot(s, y) > 1e-16 * std::sqrt(dot(s, s) * dot(y, y))) {
      mem.emplace_back(std::move(s), std::move(y));
      if (mem.size() > kMem) mem.pop_front();
    }
    first = false;
    const double change = std::abs(Rt - R) / std::max(std::abs(R), 1e-300);
    u = trial;
    grad = gtrial;
    R = Rt;
    if (R > best.ratio) {
      best.ratio = R;
      best.u = u;
    }
    quiet = change < opt.tol ? quiet + 1 : 0;
    if (quiet >= 5) {
      best.converged = true;
      break;
    }
  }
  return best;
}

}  // namespace

double entropy_ratio(const ReversibleForm& form, std::span<const double> g) {
  const double E = energy(form, g);
  if (E <= 0.0) return 0.0;
  if (std::all_of(g.begin(), g.end(), [](double x) { return x > 0.0; })) {
    std::vector<double> u(g.size());
    for (std::size_t i = 0; i < g.size(); ++i) u[i] = std::log(g[i]);
    return Objective(form).eval(u, nullptr);
  }
  std::vector<double> f(g.size());
  for (std::size_t i = 0; i < g.size(); ++i) f[i] = g[i] * g[i];
  return entropy(form.weight, f) / E;
}

LsiResult maximize_entropy_ratio(const ReversibleForm& form, const std::vector<std::vector<double>>& starts,
                                 const LsiOptions& opt) {
  const Objective obj(form);
  LsiResult res;
  for (std::size_t k = 0; k < starts.size(); ++k) {
    std::vector<double> u(starts[k].size());
    for (std::size_t i = 0; i < u.size(); ++i) {
      if (!(starts[k][i] > 0.0)) fail_argument("maximize_entropy_ratio: starts must be positive");
      u[i] = std::log(starts[k][i]);
    }
    const AscentResult a = ascend(obj, u, opt);
    if (a.converged) ++res.restarts_converged;
    if (a.ratio > res.s_lower || res.best_start < 0) {
      res.s_lower = a.ratio;
      res.best_start = static_cast<int>(k);
      res.converged = a.converged;
      res.argmax.resize(a.u.size());
      for (std::size_t i = 0; i < a.u.size(); ++i) res.argmax[i] = std::exp(a.u[i]);
    }
  }
  return res;
}

std::vector<std::vector<double>> lsi_starts(std::span<const double> fiedler, std::span<const double> split_coordinate,
                                            const LsiOptions& opt) {
  const std::size_t n = fiedler.size();
  std::vector<std::vector<double>> starts;
  double fmax = 0.0;
  for (double v : fiedler) fmax = std::max(fmax, std::abs(v));
  if (fmax == 0.0) fmax = 1.0;
  auto fied = [&](double a, bool linear) {
    std::vector<double> g(n);
    for (std::size_t i = 0; i < n; ++i) g[i] = linear ? 1.0 + a * fiedler[i] / fmax : std::exp(a * fiedler[i] / fmax);
    starts.push_back(std::move(g));
  };
  fied(1e-4, true);
  fied(0.5, false);
  fied(2.0, false);
  fied(-2.0, false);
  std::vector<double> sorted(split_coordinate.begin(), split_coordinate.end());
  std::sort(sorted.begin(), sorted.end());
  const double med = sorted.empty() ? 0.0 : sorted[sorted.size() / 2];
  double spread = sorted.empty() ? 1.0 : std::max(1.0, 0.25 * (sorted.back() - sorted.front()));
  for (double s : {1.5, -1.5}) {
    std::vector<double> g(n);
    for (std::size_t i = 0; i < n; ++i) g[i] = std::exp(s * std::tanh((split_coordinate[i] - med) / spread));
    starts.push_back(std::move(g));
  }
  std::mt19937_64 rng(opt.seed);
  std::normal_distribution<double> nd;
  const double sig[] = {0.3, 1.0, 2.0};
  for (int k = 0; static_cast<int>(starts.size()) < opt.restarts; ++k) {
    std::vector<double> g(n);
    for (double& v : g) v = std::exp(sig[k % 3] * nd(rng));
    starts.push_back(std::move(g));
  }
  if (static_cast<int>(starts.size()) > opt.restarts && opt.restarts > 0) starts.resize(static_cast<std::size_t>(opt.restarts));
  return starts;
}

LsiResult lsi_estimate(const SparseGenerator& gen, const LsiOptions& opt) {
  GapOptions gopt;
  if (gen.size() >= gopt.dense_limit) fail_cap("lsi_estimate: state count above the dense cap");
  const GapResult gap = spectral_gap_full(gen, gopt);
  const StateSpace& sp = gen.space();
  std::vector<double> split(static_cast<std::size_t>(gen.size()), 0.0);
  for (std::int64_t i = 0; i < gen.size(); ++i) {
    const auto eta = sp.state(i);
    for (int x = 0; x < sp.sites(); ++x)
      if (2 * sp.coords(x)[0] < sp.L()) split[i] += eta[x];
  }
  const ReversibleForm form = reversible_form(gen);
  LsiResult r = maximize_entropy_ratio(form, lsi_starts(gap.eigenvector, split, opt), opt);
  r.two_over_gap = 2.0 / gap.gap;
  return r;
}

}  // namespace zrp
