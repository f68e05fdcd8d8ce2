#pragma once

#include "config.hpp"
#include "output.hpp"

namespace zrp::app {

// Grid L_list x N over the target (gap, lsi or bd). Cells run on `workers`
// threads pulling from a shared index; rows come out in grid order. A failing
// cell becomes a row with the error message instead of aborting the sweep.
Result run_sweep(const RunConfig& cfg, int workers);

}  // namespace zrp::app
