#include "sweep.hpp"

#include <algorithm>
#include <atomic>
#include <exception>
#include <thread>

#include "commands.hpp"
#include "zrp/error.hpp"

namespace zrp::app {

namespace {

struct Cell2 {
  int L;
  std::int64_t N;
};

const char* kind_name(ErrorKind k) {
  switch (k) {
    case ErrorKind::invalid_argument:
      return "invalid_argument";
    case ErrorKind::numeric:
      return "numeric";
    case ErrorKind::cap_exceeded:
      return "cap_exceeded";
  }
  return "error";
}

}  // namespace

Result run_sweep(const RunConfig& cfg, int workers) {
  const std::string target = cfg.string("target");
  if (target != "gap" && target != "lsi" && target != "bd")
    throw ConfigError("key 'target': expected gap, lsi or bd");
  const RateFunction c = cfg.rate();
  const int d = static_cast<int>(cfg.integer("d"));

  std::vector<Cell2> grid;
  for (auto L : cfg.int_list("L_list")) {
    if (L < 1 || L > 1'000'000) throw ConfigError("key 'L_list': entries must be positive");
    for (auto N : cfg.N_values()) grid.push_back({static_cast<int>(L), N});
  }

  const std::size_t width = spectral_columns().size();
  std::vector<std::vector<Cell>> rows(grid.size());
  std::vector<std::string> errors(grid.size());
  std::atomic<std::size_t> next{0};
  auto work = [&] {
    for (std::size_t k = next++; k < grid.size(); k = next++) {
      const auto [L, N] = grid[k];
      try {
        rows[k] = target == "bd" ? bd_row(cfg, c, L, L, N) : gap_row(cfg, c, L, d, N, target == "lsi");
      } catch (const Error& e) {
        errors[k] = std::string(kind_name(e.kind())) + ": " + e.what();
      } catch (const std::exception& e) {
        errors[k] = e.what();
      }
      if (!errors[k].empty()) {
        rows[k].assign(width, Cell{});
        rows[k][0] = cfg.family;
        rows[k][1] = std::int64_t{L};
        rows[k][2] = std::int64_t{target == "bd" ? 1 : d};
        rows[k][3] = N;
      }
    }
  };
  const int n_threads = std::max(1, std::min<int>(workers, static_cast<int>(grid.size())));
  std::vector<std::thread> pool;
  for (int t = 1; t < n_threads; ++t) pool.emplace_back(work);
  work();
  for (auto& t : pool) t.join();

  Result r;
  r.table.columns = spectral_columns();
  r.table.columns.insert(r.table.columns.begin(), "target");
  r.table.columns.push_back("s_running_max");
  r.table.columns.push_back("error");
  const std::size_t s_col = 7;  // s_lower within spectral_columns()
  std::int64_t failed = 0;
  for (std::size_t k = 0; k < grid.size(); ++k) {
    // running max of s over N for the same L, in grid order
    Cell run{};
    if (target != "gap") {
      double best = -1.0;
      for (std::size_t j = 0; j <= k; ++j)
        if (grid[j].L == grid[k].L && std::holds_alternative<double>(rows[j][s_col]))
          best = std::max(best, std::get<double>(rows[j][s_col]));
      if (best >= 0.0) run = best;
    }
    std::vector<Cell> row;
    row.reserve(width + 3);
    row.emplace_back(target);
    row.insert(row.end(), rows[k].begin(), rows[k].end());
    row.push_back(run);
    row.push_back(errors[k].empty() ? Cell{} : Cell{errors[k]});
    if (!errors[k].empty()) ++failed;
    r.table.add(std::move(row));
  }
  r.summary = {{"cells", grid.size()}, {"failed", failed}};
  return r;
}

}  // namespace zrp::app
