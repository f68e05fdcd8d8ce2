#pragma once

#include <cstdint>
#include <vector>

#include "config.hpp"
#include "output.hpp"

namespace zrp::app {

// family, L, d, N, states, gap, gap_times_L2, s_lower, restarts_converged, B0
const std::vector<std::string>& spectral_columns();

std::vector<Cell> gap_row(const RunConfig& cfg, const RateFunction& c, int L, int d, std::int64_t N, bool with_lsi);
// Birth-death chain on {0..N} built from gamma with sub-volumes v, v2.
std::vector<Cell> bd_row(const RunConfig& cfg, const RateFunction& c, int v1, int v2, std::int64_t N);

Result run_command(const RunConfig& cfg);

}  // namespace zrp::app
