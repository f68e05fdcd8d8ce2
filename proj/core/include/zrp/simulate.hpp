#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <span>
#include <vector>

#include "zrp/measures.hpp"
#include "zrp/rates.hpp"

namespace zrp {

enum class InitialState { round_robin, packed };

struct SimConfig {
  int L = 2;
  int d = 1;
  RateFunction rate;
  int N = 1;
  std::int64_t events = 1'000'000;
  double horizon = 0.0;  // stop at this time when > 0, else after `events` jumps
  std::uint64_t seed = 1;
  InitialState initial = InitialState::round_robin;
};

struct Event {
  double time;
  std::int32_t from;
  std::int32_t to;
};

struct Trajectory {
  int L = 0;
  int d = 0;
  int N = 0;
  int sites = 0;
  std::vector<std::uint16_t> initial;
  std::vector<Event> events;
  double final_time = 0.0;

  // Little-endian dump: header (L, d, N, sites, count) then events.
  void write_binary(std::ostream& os) const;
  // FNV-1a over write_binary's bytes.
  std::uint64_t digest() const;
};

Trajectory run(const SimConfig& config);

// Calls visit(t, eta) for t = t0, t0 + dt, ... while t <= final_time.
void replay(const Trajectory& traj, double t0, double dt,
            const std::function<void(double, std::span<const std::uint16_t>)>& visit);

// Time-weighted occupation histogram of one site after t0.
std::vector<double> occupation_histogram(const Trajectory& traj, int site, double t0);

struct StationarityOptions {
  int site = 0;
  double gap = 0.0;      // used for burn-in 10/gap and thinning 5/gap when > 0
  double burn_in = -1.0; // explicit burn-in overrides the defaults
  double thin = -1.0;
  std::int64_t min_samples = 50;
};

struct StationarityResult {
  double chi2 = 0.0;
  int dof = 0;
  double pvalue = 0.0;
  std::int64_t samples = 0;
  double burn_in = 0.0;
  double thin = 0.0;
};
StationarityResult stationarity_test(const Trajectory& traj, const CountDistribution& exact_marginal,
                                     const StationarityOptions& opt = {});

struct RelaxationOptions {
  double burn_in = 0.0;
  double dt = 0.0;            // sampling step; default final_time / 2^20
  double min_correlation = 0.1;
};

struct RelaxationResult {
  double rate = 0.0;
  int lags_used = 0;
  double dt = 0.0;
};
// Exponential decay rate of the observable's autocorrelation.
RelaxationResult relaxation_estimate(const Trajectory& traj,
                                     const std::function<double(std::span<const std::uint16_t>)>& observable,
                                     const RelaxationOptions& opt = {});

}  // namespace zrp
