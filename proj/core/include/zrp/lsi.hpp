#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "zrp/generator.hpp"

namespace zrp {

// Reversible chain reduced to what the log-Sobolev ratio needs:
// E(g,g) = sum over edges of w (g_i - g_j)^2 and a probability vector.
struct ReversibleForm {
  struct Edge {
    std::int64_t i;
    std::int64_t j;
    double w;
  };
  std::vector<double> weight;
  std::vector<Edge> edges;
};

ReversibleForm reversible_form(const SparseGenerator& gen);

double energy(const ReversibleForm& form, std::span<const double> g);
// Ent(g^2) / E(g,g); +inf-safe: returns 0 for constant g.
double entropy_ratio(const ReversibleForm& form, std::span<const double> g);

struct LsiOptions {
  int restarts = 16;
  double tol = 1e-13;
  int max_steps = 100000;
  std::uint64_t seed = 20240601;
};

struct LsiResult {
  double s_lower = 0.0;
  std::vector<double> argmax;  // g with nu[g^2] = 1
  bool converged = false;      // the best start converged
  int restarts_converged = 0;
  int best_start = -1;
  double two_over_gap = 0.0;
};

// Multi-start ascent from the given starting vectors (entries > 0).
LsiResult maximize_entropy_ratio(const ReversibleForm& form, const std::vector<std::vector<double>>& starts,
                                 const LsiOptions& opt);

// Starting set: Fiedler-perturbed constants, smoothed two-block splits along
// `split_coordinate`, then log-normal draws up to opt.restarts.
std::vector<std::vector<double>> lsi_starts(std::span<const double> fiedler, std::span<const double> split_coordinate,
                                            const LsiOptions& opt);

LsiResult lsi_estimate(const SparseGenerator& gen, const LsiOptions& opt = {});

}  // namespace zrp
