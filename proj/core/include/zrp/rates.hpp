#pragma once

#include <algorithm>
#include <cstdint>
#include <functional>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

namespace zrp {

enum class RateFamily { linear, scaled_linear, parity_perturbed, user_table };

std::string_view to_string(RateFamily f);
RateFamily parse_family(std::string_view name);

struct ConditionReport {
  bool lg_holds = false;
  double measured_a1 = 0.0;
  bool m_holds = false;
  double measured_a2 = 0.0;
  int k0 = 1;
  double measured_A0 = 0.0;
  std::int64_t scan_cap = 0;
};

inline constexpr std::int64_t kDefaultScanCap = 10000;

// Jump rate c(k). Cheap to copy; copies share the log-factorial cache,
// which extends itself under a lock and is read lock-free.
class RateFunction {
 public:
  RateFunction();  // c(k) = k

  double operator()(std::int64_t k) const;
  double c(std::int64_t k) const { return (*this)(k); }
  // F(k) = sum_{j<=k} log c(j)
  double log_factorial(std::int64_t k) const;
  // (n+1)/c(n+1)
  double h(std::int64_t n) const { return static_cast<double>(n + 1) / c(n + 1); }

  RateFamily family() const;
  const std::vector<double>& params() const;
  std::string describe() const;

  // Constants measured at construction.
  const ConditionReport& conditions() const;
  int k0() const { return conditions().k0; }
  double a1() const { return conditions().measured_a1; }
  double a2() const { return conditions().measured_a2; }
  double A0() const { return conditions().measured_A0; }
  // Increment bound the family guarantees; +inf for user tables.
  double lg_bound() const;

  struct Impl;

 private:
  explicit RateFunction(std::shared_ptr<Impl> impl);
  std::shared_ptr<Impl> impl_;
  friend RateFunction build_family(RateFamily, const std::vector<double>&, std::int64_t);
};

// params: linear [lambda] (optional, default 1); scaled_linear [lambda];
// parity_perturbed [b]; user_table [c(0), c(1), ..., c(K)] with c(0) = 0.
RateFunction build_family(RateFamily family, const std::vector<double>& params,
                          std::int64_t scan_cap = kDefaultScanCap);

// One-column text file of c(1), c(2), ...
RateFunction load_user_table(const std::string& path, std::int64_t scan_cap = kDefaultScanCap);

ConditionReport check_conditions(const RateFunction& c, std::int64_t scan_cap);
// Scan of an arbitrary rate sequence, for sequences that are not valid families.
ConditionReport scan_conditions(const std::function<double(std::int64_t)>& c, std::int64_t scan_cap,
                                int k0, double lg_bound);
// Same scan with a prescribed k0.
ConditionReport check_conditions(const RateFunction& c, std::int64_t scan_cap, int k0);

inline double log_c_factorial(const RateFunction& c, std::int64_t k) { return c.log_factorial(k); }
inline double h(const RateFunction& c, std::int64_t n) { return c.h(n); }

// Scan range rule for a run that uses up to n_max particles.
inline std::int64_t scan_cap_for(std::int64_t n_max) {
  return std::max<std::int64_t>(kDefaultScanCap, 4 * n_max);
}

}  // namespace zrp
