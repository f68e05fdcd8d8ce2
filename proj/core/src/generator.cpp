#include "zrp/generator.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <random>
#include <string>

#include "zrp/error.hpp"
#include "zrp/numeric.hpp"

namespace zrp {

SparseGenerator::SparseGenerator(StateSpace space, RateFunction c) : space_(std::move(space)), c_(std::move(c)) {
  const std::int64_t n = space_.size();
  const int S = space_.sites();
  row_.assign(static_cast<std::size_t>(n) + 1, 0);
  exit_.assign(static_cast<std::size_t>(n), 0.0);
  logw_.resize(static_cast<std::size_t>(n));
  std::vector<std::uint16_t> tmp(S);
  for (std::int64_t i = 0; i < n; ++i) {
    const auto eta = space_.state(i);
    double lw = 0.0;
    for (int x = 0; x < S; ++x) lw -= c_.log_factorial(eta[x]);
    logw_[i] = lw;
    std::copy(eta.begin(), eta.end(), tmp.begin());
    for (int x = 0; x < S; ++x) {
      if (eta[x] == 0) continue;
      const double r = c_(eta[x]);
      for (int y : space_.neighbors(x)) {
        tmp[x] -= 1;
        tmp[y] += 1;
        col_.push_back(space_.rank(tmp));
        tmp[x] += 1;
        tmp[y] -= 1;
        val_.push_back(r);
        exit_[i] += r;
      }
    }
    row_[i + 1] = static_cast<std::int64_t>(col_.size());
  }
  logZ_ = log_sum_exp(logw_);
  w_.resize(logw_.size());
  for (std::size_t i = 0; i < logw_.size(); ++i) {
    logw_[i] -= logZ_;
    w_[i] = std::exp(logw_[i]);
  }
}

std::vector<double> SparseGenerator::apply(std::span<const double> f) const {
  std::vector<double> out(static_cast<std::size_t>(size()), 0.0);
  for (std::int64_t i = 0; i < size(); ++i) {
    double s = 0.0;
    for (std::int64_t k = row_[i]; k < row_[i + 1]; ++k) s += val_[k] * (f[col_[k]] - f[i]);
    out[i] = s;
  }
  return out;
}

double SparseGenerator::row_sum_residual() const {
  double worst = 0.0;
  double scale = 1.0;
  for (std::int64_t i = 0; i < size(); ++i) {
    double s = -exit_[i];
    for (std::int64_t k = row_[i]; k < row_[i + 1]; ++k) s += val_[k];
    worst = std::max(worst, std::abs(s));
    scale = std::max(scale, exit_[i]);
  }
  return worst / scale;
}

double SparseGenerator::stationarity_residual() const {
  std::vector<double> flow(static_cast<std::size_t>(size()), 0.0);
  double scale = 0.0;
  for (std::int64_t i = 0; i < size(); ++i) {
    flow[i] -= w_[i] * exit_[i];
    scale = std::max(scale, w_[i] * exit_[i]);
    for (std::int64_t k = row_[i]; k < row_[i + 1]; ++k) flow[col_[k]] += w_[i] * val_[k];
  }
  double worst = 0.0;
  for (double v : flow) worst = std::max(worst, std::abs(v));
  return scale > 0.0 ? worst / scale : worst;
}

double SparseGenerator::detailed_balance_residual() const {
  double worst = 0.0;
  const int S = space_.sites();
  for (std::int64_t i = 0; i < size(); ++i) {
    const auto eta = space_.state(i);
    for (int x = 0; x < S; ++x) {
      if (eta[x] == 0) continue;
      for (int y : space_.neighbors(x)) {
        const std::int64_t j = space_.move(i, x, y);
        const double lhs = std::log(c_(eta[x])) + logw_[i];
        const double rhs = std::log(c_(eta[y] + 1)) + logw_[j];
        worst = std::max(worst, std::abs(std::expm1(lhs - rhs)));
      }
    }
  }
  return worst;
}

double dirichlet(const SparseGenerator& gen, std::span<const double> f, std::span<const double> g) {
  double s = 0.0;
  const auto& w = gen.weights();
  for (std::int64_t i = 0; i < gen.size(); ++i) {
    const auto t = gen.targets(i);
    const auto r = gen.rates(i);
    double local = 0.0;
    for (std::size_t k = 0; k < t.size(); ++k) local += r[k] * (f[t[k]] - f[i]) * (g[t[k]] - g[i]);
    s += w[i] * local;
  }
  return 0.5 * s;
}

double dirichlet_quadratic(const SparseGenerator& gen, std::span<const double> f, std::span<const double> g) {
  const std::vector<double> lg = gen.apply(g);
  const auto& w = gen.weights();
  double s = 0.0;
  for (std::size_t i = 0; i < w.size(); ++i) s += w[i] * f[i] * lg[i];
  return -s;
}

double entropy_log(std::span<const double> log_weights, std::span<const double> f) {
  std::vector<double> w(log_weights.size());
  const double z = log_sum_exp(log_weights);
  for (std::size_t i = 0; i < w.size(); ++i) w[i] = std::exp(log_weights[i] - z);
  return entropy(w, f);
}

namespace {

// Symmetrized operator B = D^{1/2} (-L) D^{-1/2} in CSR form.
struct SymOperator {
  std::vector<std::int64_t> row;
  std::vector<std::int64_t> col;
  std::vector<double> val;  // off-diagonal, already negated
  std::vector<double> diag;

  explicit SymOperator(const SparseGenerator& gen) {
    const auto& lw = gen.log_weights();
    row.assign(static_cast<std::size_t>(gen.size()) + 1, 0);
    diag.resize(static_cast<std::size_t>(gen.size()));
    for (std::int64_t i = 0; i < gen.size(); ++i) {
      const auto t = gen.targets(i);
      const auto r = gen.rates(i);
      for (std::size_t k = 0; k < t.size(); ++k) {
        col.push_back(t[k]);
        val.push_back(-r[k] * std::exp(0.5 * (lw[i] - lw[t[k]])));
      }
      row[i + 1] = static_cast<std::int64_t>(col.size());
      diag[i] = gen.exit_rate(i);
    }
  }

  void apply(const Eigen::VectorXd& x, Eigen::VectorXd& y) const {
    const auto n = static_cast<std::int64_t>(diag.size());
    for (std::int64_t i = 0; i < n; ++i) {
      double s = diag[i] * x[i];
      for (std::int64_t k = row[i]; k < row[i + 1]; ++k) s += val[k] * x[col[k]];
      y[i] = s;
    }
  }
};

GapResult dense_gap(const SparseGenerator& gen) {
  const SymOperator op(gen);
  const auto n = static_cast<Eigen::Index>(gen.size());
  Eigen::MatrixXd B = Eigen::MatrixXd::Zero(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    B(i, i) = op.diag[i];
    for (std::int64_t k = op.row[i]; k < op.row[i + 1]; ++k) B(i, op.col[k]) += op.val[k];
  }
  const Eigen::MatrixXd S = 0.5 * (B + B.transpose());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(S);
  if (es.info() != Eigen::Success) fail_numeric("spectral_gap: dense eigensolver failed");
  GapResult r;
  r.dense = true;
  r.gap = es.eigenvalues()[1];
  const Eigen::VectorXd v = es.eigenvectors().col(1);
  r.eigenvector.resize(static_cast<std::size_t>(n));
  for (Eigen::Index i = 0; i < n; ++i) r.eigenvector[i] = v[i] / std::sqrt(gen.weights()[i]);
  Eigen::VectorXd bv(n);
  op.apply(v, bv);
  r.residual = (bv - r.gap * v).norm();
  return r;
}

GapResult lanczos_gap(const SparseGenerator& gen, const GapOptions& opt) {
  const SymOperator op(gen);
  const auto n = static_cast<Eigen::Index>(gen.size());
  Eigen::VectorXd u0(n);
  for (Eigen::Index i = 0; i < n; ++i) u0[i] = std::sqrt(gen.weights()[i]);
  u0.normalize();
  const Eigen::Index budget = std::max<Eigen::Index>(12, static_cast<Eigen::Index>(60'000'000 / std::max<Eigen::Index>(n, 1)));
  const Eigen::Index m = std::min<Eigen::Index>({n - 1, 150, budget});

  std::mt19937_64 rng(12345);
  std::normal_distribution<double> nd;
  Eigen::VectorXd x(n);
  for (Eigen::Index i = 0; i < n; ++i) x[i] = nd(rng);
  auto deflate = [&](Eigen::VectorXd& v) { v -= u0.dot(v) * u0; };
  deflate(x);
  x.normalize();

  Eigen::MatrixXd V(n, m + 1);
  Eigen::VectorXd w(n);
  double theta_prev = std::numeric_limits<double>::infinity();
  GapResult r;
  r.dense = false;
  for (int restart = 0; restart < opt.max_restarts; ++restart) {
    V.col(0) = x;
    std::vector<double> alpha;
    std::vector<double> beta;
    Eigen::Index k = 0;
    bool invariant = false;
    for (; k < m; ++k) {
      op.apply(V.col(k), w);
      const double a = V.col(k).dot(w);
      alpha.push_back(a);
      for (int pass = 0; pass < 2; ++pass) {
        deflate(w);
        const Eigen::VectorXd h = V.leftCols(k + 1).transpose() * w;
        w -= V.leftCols(k + 1) * h;
      }
      const double b = w.norm();
      beta.push_back(b);
      if (b <= 1e-13 * std::max(1.0, std::abs(a))) {
        invariant = true;
        ++k;
        break;
      }
      V.col(k + 1) = w / b;
    }
    const Eigen::Index kk = static_cast<Eigen::Index>(alpha.size());
    Eigen::MatrixXd T = Eigen::MatrixXd::Zero(kk, kk);
    for (Eigen::Index i = 0; i < kk; ++i) {
      T(i, i) = alpha[i];
      if (i + 1 < kk) T(i, i + 1) = T(i + 1, i) = beta[i];
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(T);
    const double theta = es.eigenvalues()[0];
    const Eigen::VectorXd y = es.eigenvectors().col(0);
    x = V.leftCols(kk) * y;
    deflate(x);
    x.normalize();
    op.apply(x, w);
    const double res = (w - theta * x).norm();
    r.iterations += static_cast<int>(kk);
    r.gap = theta;
    r.residual = res;
    const bool small_res = res <= opt.tol * std::abs(theta);
    const bool stalled = std::abs(theta - theta_prev) <= 1e-3 * opt.tol * std::abs(theta) && res <= 1e-4 * std::abs(theta);
    if (invariant || small_res || stalled) {
      r.eigenvector.resize(static_cast<std::size_t>(n));
      for (Eigen::Index i = 0; i < n; ++i) r.eigenvector[i] = x[i] / std::sqrt(gen.weights()[i]);
      return r;
    }
    theta_prev = theta;
  }
  fail_numeric("spectral_gap: Lanczos did not converge, residual " + std::to_string(r.residual));
}

}  // namespace

GapResult spectral_gap_full(const SparseGenerator& gen, const GapOptions& opt) {
  if (gen.size() < 2) fail_argument("spectral_gap: state space has fewer than two states");
  if (gen.size() < opt.dense_limit) return dense_gap(gen);
  return lanczos_gap(gen, opt);
}

}  // namespace zrp
