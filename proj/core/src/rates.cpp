#include "zrp/rates.hpp"

#include <array>
#include <atomic>
#include <cmath>
#include <fstream>
#include <functional>
#include <limits>
#include <mutex>
#include <sstream>

#include "zrp/error.hpp"

namespace zrp {

namespace {

// Append-only cache of F(k). Blocks never move, so readers only need the
// published size.
class LogFactorialCache {
 public:
  static constexpr std::size_t kBlock = 1 << 12;
  static constexpr std::size_t kMaxBlocks = 1 << 13;

  template <class RateFn>
  double get(std::int64_t k, const RateFn& rate) {
    const auto idx = static_cast<std::size_t>(k);
    if (idx < size_.load(std::memory_order_acquire)) return at(idx);
    std::lock_guard<std::mutex> lock(mu_);
    std::size_t n = size_.load(std::memory_order_relaxed);
    if (idx >= kBlock * kMaxBlocks) fail_argument("log_factorial: index beyond cache capacity");
    double prev = n == 0 ? 0.0 : at(n - 1);
    while (n <= idx) {
      const std::size_t b = n / kBlock;
      if (n % kBlock == 0) {
        owned_[b] = std::make_unique<double[]>(kBlock);
        blocks_[b].store(owned_[b].get(), std::memory_order_release);
      }
      const double v = n == 0 ? 0.0 : prev + std::log(rate(static_cast<std::int64_t>(n)));
      owned_[b][n % kBlock] = v;
      prev = v;
      ++n;
      if (n % kBlock == 0 || n > idx) size_.store(n, std::memory_order_release);
    }
    return at(idx);
  }

 private:
  double at(std::size_t i) const {
    return blocks_[i / kBlock].load(std::memory_order_acquire)[i % kBlock];
  }

  std::array<std::atomic<double*>, kMaxBlocks> blocks_{};
  std::array<std::unique_ptr<double[]>, kMaxBlocks> owned_{};
  std::atomic<std::size_t> size_{0};
  std::mutex mu_;
};

}  // namespace

struct RateFunction::Impl {
  RateFamily family = RateFamily::linear;
  std::vector<double> params;
  std::vector<double> table;  // user_table: c(0..K)
  double lambda = 1.0;
  double b = 0.0;
  double lg_bound = std::numeric_limits<double>::infinity();
  int k0 = 1;
  ConditionReport report;
  LogFactorialCache cache;

  double rate(std::int64_t k) const {
    if (k <= 0) return 0.0;
    switch (family) {
      case RateFamily::linear:
      case RateFamily::scaled_linear:
        return lambda * static_cast<double>(k);
      case RateFamily::parity_perturbed:
        return static_cast<double>(k) + b * static_cast<double>(k % 2);
      case RateFamily::user_table: {
        const auto K = static_cast<std::int64_t>(table.size()) - 1;
        if (k <= K) return table[static_cast<std::size_t>(k)];
        const double slope = table[K] - table[K - 1];
        return table[K] + slope * static_cast<double>(k - K);
      }
    }
    return 0.0;
  }
};

std::string_view to_string(RateFamily f) {
  switch (f) {
    case RateFamily::linear: return "linear";
    case RateFamily::scaled_linear: return "scaled_linear";
    case RateFamily::parity_perturbed: return "parity_perturbed";
    case RateFamily::user_table: return "user_table";
  }
  return "?";
}

RateFamily parse_family(std::string_view name) {
  if (name == "linear") return RateFamily::linear;
  if (name == "scaled_linear") return RateFamily::scaled_linear;
  if (name == "parity_perturbed") return RateFamily::parity_perturbed;
  if (name == "user_table") return RateFamily::user_table;
  fail_argument("unknown rate family '" + std::string(name) + "'");
}

RateFunction::RateFunction() : RateFunction(build_family(RateFamily::linear, {}, 100)) {}

RateFunction::RateFunction(std::shared_ptr<Impl> impl) : impl_(std::move(impl)) {}

double RateFunction::operator()(std::int64_t k) const { return impl_->rate(k); }

double RateFunction::log_factorial(std::int64_t k) const {
  if (k < 0) fail_argument("log_factorial: negative argument");
  return impl_->cache.get(k, [this](std::int64_t j) { return impl_->rate(j); });
}

RateFamily RateFunction::family() const { return impl_->family; }
const std::vector<double>& RateFunction::params() const { return impl_->params; }
const ConditionReport& RateFunction::conditions() const { return impl_->report; }
double RateFunction::lg_bound() const { return impl_->lg_bound; }

std::string RateFunction::describe() const {
  std::ostringstream os;
  os << to_string(impl_->family);
  if (impl_->family != RateFamily::user_table && !impl_->params.empty()) {
    os << '(';
    for (std::size_t i = 0; i < impl_->params.size(); ++i) os << (i ? "," : "") << impl_->params[i];
    os << ')';
  }
  return os.str();
}

ConditionReport scan_conditions(const std::function<double(std::int64_t)>& c, std::int64_t scan_cap,
                                int k0, double lg_bound) {
  if (k0 < 1) fail_argument("check_conditions: k0 must be >= 1");
  if (scan_cap < k0 + 2) fail_argument("check_conditions: scan_cap must be >= k0 + 2");
  ConditionReport r;
  r.scan_cap = scan_cap;
  r.k0 = k0;
  double a1 = 0.0;
  double A0 = 1.0;
  for (std::int64_t k = 0; k < scan_cap; ++k) a1 = std::max(a1, std::abs(c(k + 1) - c(k)));
  for (std::int64_t k = 1; k <= scan_cap; ++k) {
    const double ck = c(k);
    const double kk = static_cast<double>(k);
    A0 = std::max({A0, ck / kk, kk / ck});
  }
  // inf over j + k0 <= k of c(k) - c(j) equals inf_k [c(k) - max_{j <= k-k0} c(j)]
  double a2 = std::numeric_limits<double>::infinity();
  double run_max = -std::numeric_limits<double>::infinity();
  for (std::int64_t k = k0; k <= scan_cap; ++k) {
    run_max = std::max(run_max, c(k - k0));
    a2 = std::min(a2, c(k) - run_max);
  }
  r.measured_a1 = a1;
  r.measured_A0 = A0;
  r.measured_a2 = a2;
  r.m_holds = a2 > 0.0;
  r.lg_holds = std::isfinite(a1) && a1 <= lg_bound * (1.0 + 1e-12);
  return r;
}

namespace {

ConditionReport scan_family(const std::function<double(std::int64_t)>& c, bool search_k0, int k0,
                            std::int64_t scan_cap, double lg_bound) {
  if (!search_k0) return scan_conditions(c, scan_cap, k0, lg_bound);
  ConditionReport r;
  for (int k = 1; k <= 32 && k + 2 <= scan_cap; ++k) {
    r = scan_conditions(c, scan_cap, k, lg_bound);
    if (r.m_holds) break;
  }
  return r;
}

}  // namespace

ConditionReport check_conditions(const RateFunction& c, std::int64_t scan_cap, int k0) {
  return scan_conditions(c, scan_cap, k0, c.lg_bound());
}

ConditionReport check_conditions(const RateFunction& c, std::int64_t scan_cap) {
  return scan_family(c, c.family() == RateFamily::user_table, c.k0(), scan_cap, c.lg_bound());
}

RateFunction build_family(RateFamily family, const std::vector<double>& params, std::int64_t scan_cap) {
  auto impl = std::make_shared<RateFunction::Impl>();
  impl->family = family;
  impl->params = params;
  switch (family) {
    case RateFamily::linear:
      if (params.size() > 1) fail_argument("linear: expects at most one parameter (lambda)");
      impl->lambda = params.empty() ? 1.0 : params[0];
      if (!(impl->lambda > 0.0) || !std::isfinite(impl->lambda)) fail_argument("linear: lambda must be > 0");
      impl->lg_bound = impl->lambda;
      impl->k0 = 1;
      break;
    case RateFamily::scaled_linear:
      if (params.size() != 1) fail_argument("scaled_linear: expects one parameter (lambda)");
      impl->lambda = params[0];
      if (!(impl->lambda > 0.0) || !std::isfinite(impl->lambda)) fail_argument("scaled_linear: lambda must be > 0");
      impl->lg_bound = impl->lambda;
      impl->k0 = 1;
      break;
    case RateFamily::parity_perturbed:
      if (params.size() != 1) fail_argument("parity_perturbed: expects one parameter (b)");
      impl->b = params[0];
      if (!(impl->b >= 0.0 && impl->b < 1.0)) fail_argument("parity_perturbed: b must lie in [0,1)");
      impl->lg_bound = 1.0 + impl->b;
      impl->k0 = 2;
      break;
    case RateFamily::user_table: {
      if (params.size() < 2) fail_argument("user_table: needs c(0) and at least c(1)");
      if (params[0] != 0.0) fail_argument("user_table: c(0) must be 0");
      for (std::size_t k = 1; k < params.size(); ++k)
        if (!(params[k] > 0.0) || !std::isfinite(params[k]))
          fail_argument("user_table: c(" + std::to_string(k) + ") must be positive");
      impl->table = params;
      const std::size_t K = params.size() - 1;
      if (params[K] - params[K - 1] < 0.0)
        fail_argument("user_table: last increment negative, cannot extend the table");
      break;
    }
  }
  const RateFunction::Impl& ref = *impl;
  impl->report = scan_family([&ref](std::int64_t k) { return ref.rate(k); },
                             family == RateFamily::user_table, impl->k0, scan_cap, impl->lg_bound);
  impl->k0 = impl->report.k0;
  if (!impl->report.lg_holds) fail_argument("rate family violates (LG) on the scan range");
  if (!impl->report.m_holds) fail_argument("rate family violates (M) on the scan range");
  return RateFunction(std::move(impl));
}

RateFunction load_user_table(const std::string& path, std::int64_t scan_cap) {
  std::ifstream in(path);
  if (!in) fail_argument("cannot open rate table '" + path + "'");
  std::vector<double> values{0.0};
  std::string line;
  while (std::getline(in, line)) {
    const auto p = line.find_first_not_of(" \t\r");
    if (p == std::string::npos || line[p] == '#') continue;
    std::istringstream ls(line);
    double v = 0.0;
    if (!(ls >> v)) fail_argument("rate table '" + path + "': bad line '" + line + "'");
    values.push_back(v);
  }
  return build_family(RateFamily::user_table, values, scan_cap);
}

}  // namespace zrp
