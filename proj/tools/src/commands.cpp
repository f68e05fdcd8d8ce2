#include "commands.hpp"

#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>

#include "sweep.hpp"
#include "zrp/birth_death.hpp"
#include "zrp/error.hpp"
#include "zrp/gamma.hpp"
#include "zrp/generator.hpp"
#include "zrp/identities.hpp"
#include "zrp/llt.hpp"
#include "zrp/lsi.hpp"
#include "zrp/measures.hpp"
#include "zrp/numeric.hpp"
#include "zrp/simulate.hpp"

namespace zrp::app {

using nlohmann::json;

namespace {

std::string family_label(const RunConfig& cfg) { return cfg.family; }

int as_int(std::int64_t v, const char* key) {
  if (v < 0 || v > 1'000'000'000) throw ConfigError(std::string("key '") + key + "': out of range");
  return static_cast<int>(v);
}

std::string hex64(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

LsiOptions lsi_options(const RunConfig& cfg) {
  LsiOptions o;
  if (cfg.has("restarts")) o.restarts = as_int(cfg.integer("restarts"), "restarts");
  if (cfg.has("seed")) o.seed = static_cast<std::uint64_t>(cfg.integer("seed"));
  return o;
}

Result cmd_rates(const RunConfig& cfg) {
  const RateFunction c = cfg.rate();
  Result r;
  r.table.columns = {"k", "c", "log_factorial", "h"};
  const std::int64_t kmax = cfg.integer("kmax");
  for (std::int64_t k = 0; k <= kmax; ++k) r.table.add({k, c(k), c.log_factorial(k), c.h(k)});
  const ConditionReport rep = check_conditions(c, cfg.integer("scan_cap"));
  r.summary = {{"family", std::string(to_string(c.family()))}, {"lg_holds", rep.lg_holds},
               {"a1", rep.measured_a1}, {"m_holds", rep.m_holds}, {"k0", rep.k0}, {"a2", rep.measured_a2},
               {"A0", rep.measured_A0}, {"scan_cap", rep.scan_cap}};
  return r;
}

Result cmd_measures(const RunConfig& cfg) {
  const RateFunction c = cfg.rate();
  const double rho = cfg.real("rho");
  const int v = as_int(cfg.integer("volume"), "volume");
  const GrandCanonical gc = solve_alpha(c, rho);
  std::int64_t cap = 0;
  if (cfg.has("cap")) {
    cap = cfg.integer("cap");
  } else {
    const double m = rho * v;
    cap = static_cast<std::int64_t>(std::ceil(m + 12.0 * std::sqrt(gc.sigma2 * v) + 20.0));
  }
  const CountDistribution d = count_distribution(c, rho, v, cap);
  Result r;
  r.table.columns = {"n", "p"};
  for (std::int64_t n = 0; n <= cap; ++n) r.table.add({n, d.prob(n)});
  r.summary = {{"rho", rho}, {"alpha", gc.alpha}, {"logZ", gc.logZ}, {"sigma2", gc.sigma2}, {"volume", v}};
  if (cfg.has("canonical_N")) {
    const CanonicalTable t = canonical_table(c, v, cfg.integer("canonical_N"));
    json rows = json::array();
    for (int k = 1; k <= v; ++k) rows.push_back(t.row(k));
    r.summary["canonical"] = {{"volume", v}, {"N_max", t.N_max()}, {"logZ", rows}};
  }
  return r;
}

Result cmd_gamma(const RunConfig& cfg) {
  const RateFunction c = cfg.rate();
  const int v1 = as_int(cfg.integer("v1"), "v1");
  const int v2 = as_int(cfg.integer("v2"), "v2");
  const std::int64_t N = cfg.integer("N");
  const GammaDistribution g = cfg.has("rho") ? gamma_product(c, v1, v2, N, cfg.real("rho")) : gamma_product(c, v1, v2, N);
  Result r;
  r.table.columns = {"n", "gamma", "gamma_tilde", "H"};
  const RatioDiagnostics d = ratio_diagnostics(g);
  const EnvelopeFit env = gaussian_envelope(g);
  r.summary = {{"A0_dec", d.A0_dec},     {"binding_dec", d.binding_dec}, {"A0_ratio", d.A0_ratio},
               {"binding_ratio", d.binding_ratio}, {"A0_envelope", env.A0}, {"binding_envelope", env.binding_n}};
  if (v1 == v2) {
    const RegularizedGamma rg = regularize(g, cfg.real("eps"), c);
    for (std::int64_t n = 0; n <= N; ++n)
      r.table.add({n, g.prob(n), std::exp(rg.logg_tilde[n]), rg.in_window(n) ? Cell{rg.H_at(n)} : Cell{}});
    r.summary["equivalence_const"] = rg.equivalence_constant(g);
    r.summary["window"] = {rg.window_lo, rg.window_hi};
  } else {
    for (std::int64_t n = 0; n <= N; ++n) r.table.add({n, g.prob(n), Cell{}, Cell{}});
  }
  return r;
}

Result cmd_spectral(const RunConfig& cfg, bool with_lsi) {
  const RateFunction c = cfg.rate();
  const int L = as_int(cfg.integer("L"), "L");
  const int d = as_int(cfg.integer("d"), "d");
  Result r;
  r.table.columns = spectral_columns();
  for (std::int64_t N : cfg.N_values()) r.table.add(gap_row(cfg, c, L, d, N, with_lsi));
  return r;
}

Result cmd_bd(const RunConfig& cfg) {
  const RateFunction c = cfg.rate();
  const int v1 = as_int(cfg.integer("v1"), "v1");
  const int v2 = as_int(cfg.integer("v2"), "v2");
  Result r;
  r.table.columns = spectral_columns();
  for (std::int64_t N : cfg.N_values()) r.table.add(bd_row(cfg, c, v1, v2, N));
  return r;
}

std::string binding(std::initializer_list<std::pair<const char*, double>> kv) {
  std::ostringstream os;
  bool first = true;
  for (const auto& [k, v] : kv) {
    if (!first) os << ' ';
    os << k << '=' << format_real(v);
    first = false;
  }
  return os.str();
}

Result cmd_identities(const RunConfig& cfg) {
  const RateFunction c = cfg.rate();
  const std::string suite = cfg.string("suite");
  const bool all = suite == "all";
  if (!all && suite != "reversibility" && suite != "gradient" && suite != "entropy" && suite != "mgf" &&
      suite != "covariance")
    throw ConfigError("key 'suite': unknown suite '" + suite + "'");
  const int L = as_int(cfg.integer("L"), "L");
  const int N = as_int(cfg.integer("N"), "N");
  const int count = as_int(cfg.integer("count"), "count");
  const auto seed = static_cast<std::uint64_t>(cfg.integer("seed"));
  Result r;
  r.table.columns = {"check", "instances", "max_residual", "min_slack", "fitted_constant", "binding_case"};
  const bool need_system = all || suite == "reversibility" || suite == "gradient" || suite == "entropy";
  if (need_system) {
    const SplitSystem sys(c, L, N);
    const TestFunctionSet fs = TestFunctionSet::make(sys.size(), count, seed);
    if (all || suite == "reversibility") {
      double worst = 0.0;
      std::string where;
      std::int64_t inst = 0;
      for (std::size_t k = 0; k < fs.size(); ++k)
        for (int x = 0; x < 2 * L; ++x)
          for (int y = L; y < 2 * L; ++y) {
            if (x == y) continue;
            for (int n = 1; n <= N; ++n) {
              ++inst;
              const double res = verify_reversibility(sys, fs.f[k], x, y, n).residual;
              if (res >= worst) {
                worst = res;
                where = binding({{"f", double(k)}, {"x", double(x)}, {"y", double(y)}, {"n", double(n)}});
              }
            }
          }
      r.table.add({"reversibility", inst, worst, Cell{}, Cell{}, where});
    }
    if (all || suite == "gradient") {
      double fw = 0.0, bw = 0.0, ab = 0.0;
      std::string wf, wb, wa;
      std::int64_t inst = 0;
      for (std::size_t k = 0; k < fs.size(); ++k)
        for (int n = 1; n <= N; ++n) {
          ++inst;
          const GradientCheck g = verify_gradient_representation(sys, fs.f[k], n);
          const ABSplit s = decompose_AB(sys, fs.f[k], n);
          const std::string here = binding({{"f", double(k)}, {"n", double(n)}});
          if (g.residual_forward >= fw) fw = g.residual_forward, wf = here;
          if (g.residual_backward >= bw) bw = g.residual_backward, wb = here;
          if (s.residual >= ab) ab = s.residual, wa = here;
        }
      r.table.add({"gradient_forward", inst, fw, Cell{}, Cell{}, wf});
      r.table.add({"gradient_backward", inst, bw, Cell{}, Cell{}, wb});
      r.table.add({"ab_decomposition", inst, ab, Cell{}, Cell{}, wa});
      const ABoundFit a = verify_A_bound(sys, fs.f);
      r.table.add({"a_bound", inst, Cell{}, Cell{}, a.C_all_edges,
                   binding({{"n", double(a.binding_n)}, {"f", double(a.binding_f)}})});
      if (L >= 2)
        r.table.add({"a_bound_within_blocks", inst, Cell{}, Cell{}, a.C_within,
                     binding({{"n", double(a.binding_n_within)}, {"f", double(a.binding_f_within)}})});
    }
    if (all || suite == "entropy") {
      double id = 0.0, gap = std::numeric_limits<double>::infinity(), ineq = std::numeric_limits<double>::infinity(), roth = std::numeric_limits<double>::infinity();
      std::string wi, wg, we, wr;
      std::int64_t inst = 0;
      for (std::size_t k = 0; k < fs.size(); ++k) {
        ++inst;
        const TensorizationCheck t = entropy_tensorization(sys, fs.f[k]);
        const std::string here = binding({{"f", double(k)}});
        if (t.identity_residual >= id) id = t.identity_residual, wi = here;
        if (t.inequality_gap < gap) gap = t.inequality_gap, wg = here;
        const double rs = rothaus_check(sys.weights(), fs.f[k]);
        if (rs < roth) roth = rs, wr = here;
        std::vector<double> g = fs.f[(k + 1) % fs.size()];
        for (double& v : g) v = std::log(v);
        for (double t0 : {0.1, 1.0, 10.0}) {
          const EntropyInequality e = entropy_inequality(sys.weights(), fs.f[k], g, t0);
          const double s = std::min(e.slack, e.min_slack_grid);
          if (s < ineq) ineq = s, we = binding({{"f", double(k)}, {"t", t0}});
        }
      }
      r.table.add({"entropy_decomposition", inst, id, Cell{}, Cell{}, wi});
      r.table.add({"entropy_tensorization", inst, Cell{}, gap, Cell{}, wg});
      r.table.add({"entropy_inequality", inst * 3, Cell{}, ineq, Cell{}, we});
      r.table.add({"rothaus", inst, Cell{}, roth, Cell{}, wr});
    }
  }
  const int volume = as_int(cfg.integer("volume"), "volume");
  if (all || suite == "mgf") {
    const MgfFit m = mgf_bounds(c, volume, 1, N, default_t_grid());
    const auto inst = static_cast<std::int64_t>(N * default_t_grid().size());
    r.table.add({"mgf_c", inst, Cell{}, Cell{}, m.A_c, binding({{"N", double(m.binding_N_c)}, {"t", m.binding_t_c}})});
    r.table.add({"mgf_h", inst, Cell{}, Cell{}, m.A_h, binding({{"N", double(m.binding_N_h)}, {"t", m.binding_t_h}})});
  }
  if (all || suite == "covariance") {
    const CovarianceFit cv = covariance_bounds(c, volume, 1, N, count, seed);
    const std::int64_t inst = static_cast<std::int64_t>(N) * count;
    r.table.add({"covariance_c", inst, Cell{}, Cell{}, cv.C_c,
                 binding({{"N", double(cv.binding_N_c)}, {"f", double(cv.binding_f_c)}})});
    r.table.add({"covariance_h", inst, Cell{}, Cell{}, cv.C_h,
                 binding({{"N", double(cv.binding_N_h)}, {"f", double(cv.binding_f_h)}})});
  }
  return r;
}

Result cmd_llt(const RunConfig& cfg) {
  const RateFunction c = cfg.rate();
  const LLTRegime regime = parse_regime(cfg.string("regime"));
  std::vector<int> volumes;
  for (auto v : cfg.int_list("volumes")) volumes.push_back(as_int(v, "volumes"));
  LLTReport rep;
  switch (regime) {
    case LLTRegime::poisson:
      rep = poisson_error(c, cfg.integer("N0"), volumes);
      break;
    case LLTRegime::gaussian_small_rho:
    case LLTRegime::gaussian_large_rho:
      rep = gaussian_error(c, cfg.real_list("rhos"), volumes, regime);
      break;
    case LLTRegime::central_value:
      rep = central_value(c, volumes, cfg.int_list("Ns"));
      break;
    case LLTRegime::tail_ratio:
      rep = tail_ratio(c, cfg.real("rho"), as_int(cfg.integer("volume"), "volume"), cfg.integer("n_lo"),
                       cfg.integer("n_hi"));
      break;
  }
  Result r;
  r.table.columns = {"regime", "volume", "param", "n", "lhs", "scaled", "fitted_constant"};
  const std::string name(to_string(regime));
  for (const auto& p : rep.cells)
    r.table.add({name, std::int64_t{p.volume}, p.param, p.n, p.lhs, p.scaled, rep.constant});
  r.summary = {{"regime", name},
               {"grid", rep.grid},
               {"fitted_constant", rep.constant},
               {"binding", {{"volume", rep.binding.volume}, {"param", rep.binding.param}, {"n", rep.binding.n}}}};
  if (regime == LLTRegime::central_value) {
    r.summary["inf"] = rep.inf_value;
    r.summary["sup"] = rep.sup_value;
  }
  return r;
}

Result cmd_simulate(const RunConfig& cfg) {
  SimConfig sc;
  sc.L = as_int(cfg.integer("L"), "L");
  sc.d = as_int(cfg.integer("d"), "d");
  sc.N = as_int(cfg.integer("N"), "N");
  sc.rate = cfg.rate();
  sc.events = cfg.integer("events");
  sc.horizon = cfg.real("horizon");
  sc.seed = static_cast<std::uint64_t>(cfg.integer("seed"));
  const std::string init = cfg.string("initial");
  if (init == "packed") {
    sc.initial = InitialState::packed;
  } else if (init != "round_robin") {
    throw ConfigError("key 'initial': expected round_robin or packed");
  }
  const Trajectory t = run(sc);
  Result r;
  if (cfg.boolean("summary")) {
    r.summary_only = true;
    r.summary = {{"events", t.events.size()}, {"final_time", t.final_time}, {"digest", hex64(t.digest())}};
    const int site = as_int(cfg.integer("site"), "site");
    const CountDistribution m = canonical_site_marginal(canonical_table(sc.rate, t.sites, sc.N), sc.N);
    StationarityOptions so;
    so.site = site;
    GapResult gap;
    const bool enumerable = StateSpace::count(sc.N, t.sites) <= 200000;
    if (enumerable) {
      gap = spectral_gap_full(SparseGenerator(StateSpace(sc.L, sc.d, sc.N), sc.rate));
      so.gap = gap.gap;
      r.summary["gap"] = gap.gap;
    }
    const StationarityResult st = stationarity_test(t, m, so);
    r.summary["chi2"] = st.chi2;
    r.summary["dof"] = st.dof;
    r.summary["pvalue"] = st.pvalue;
    r.summary["samples"] = st.samples;
    RelaxationOptions ro;
    ro.burn_in = st.burn_in;
    std::function<double(std::span<const std::uint16_t>)> obs;
    if (enumerable) {
      ro.dt = 0.05 / gap.gap;
      const StateSpace sp(sc.L, sc.d, sc.N);
      obs = [sp, v = gap.eigenvector](std::span<const std::uint16_t> eta) { return v[sp.rank(eta)]; };
    } else {
      obs = [site](std::span<const std::uint16_t> eta) { return static_cast<double>(eta[site]); };
    }
    const RelaxationResult rel = relaxation_estimate(t, obs, ro);
    r.summary["relaxation_rate"] = rel.rate;
    r.summary["relaxation_lags"] = rel.lags_used;
    return r;
  }
  if (cfg.format == "binary") {
    std::ostringstream os;
    t.write_binary(os);
    r.binary = os.str();
    return r;
  }
  r.table.columns = {"time", "from", "to"};
  for (const auto& e : t.events) r.table.add({e.time, std::int64_t{e.from}, std::int64_t{e.to}});
  r.summary = {{"final_time", t.final_time}, {"digest", hex64(t.digest())}};
  return r;
}

}  // namespace

const std::vector<std::string>& spectral_columns() {
  static const std::vector<std::string> cols{"family", "L",      "d",      "N", "states", "gap", "gap_times_L2",
                                             "s_lower", "restarts_converged", "B0"};
  return cols;
}

std::vector<Cell> gap_row(const RunConfig& cfg, const RateFunction& c, int L, int d, std::int64_t N, bool with_lsi) {
  const SparseGenerator gen(StateSpace(L, d, as_int(N, "N")), c);
  std::vector<Cell> row{family_label(cfg), std::int64_t{L}, std::int64_t{d}, N, gen.size()};
  if (with_lsi) {
    const LsiResult s = lsi_estimate(gen, lsi_options(cfg));
    const double gap = 2.0 / s.two_over_gap;
    row.insert(row.end(), {gap, gap * L * L, s.s_lower, std::int64_t{s.restarts_converged}, Cell{}});
  } else {
    const double gap = spectral_gap(gen);
    row.insert(row.end(), {gap, gap * L * L, Cell{}, Cell{}, Cell{}});
  }
  return row;
}

std::vector<Cell> bd_row(const RunConfig& cfg, const RateFunction& c, int v1, int v2, std::int64_t N) {
  const GammaDistribution g = gamma_product(c, v1, v2, N);
  const std::string source = cfg.has("source") ? cfg.string("source") : "gamma";
  BirthDeathChain ch;
  CmrBound b;
  if (source == "regularized") {
    if (v1 != v2) throw ConfigError("key 'source': regularized needs v1 == v2");
    const RegularizedGamma rg = regularize(g, cfg.real("eps"), c);
    ch = bd_from_gamma(rg);
    b = cmr_bound(rg);
  } else if (source == "gamma") {
    ch = bd_from_gamma(g);
    b = cmr_bound(g);
  } else {
    throw ConfigError("key 'source': expected gamma or regularized");
  }
  std::vector<Cell> row{family_label(cfg), std::int64_t{v1}, std::int64_t{1}, N, N + 1, bd_spectral_gap(ch), Cell{}};
  if (N <= 200) {
    const LsiResult s = bd_lsi_exact(ch, lsi_options(cfg));
    row.insert(row.end(), {s.s_lower, std::int64_t{s.restarts_converged}});
  } else {
    row.insert(row.end(), {Cell{}, Cell{}});
  }
  row.push_back(b.B0);
  return row;
}

Result run_command(const RunConfig& cfg) {
  const std::string& c = cfg.command;
  if (c == "rates") return cmd_rates(cfg);
  if (c == "measures") return cmd_measures(cfg);
  if (c == "gamma") return cmd_gamma(cfg);
  if (c == "gap") return cmd_spectral(cfg, false);
  if (c == "lsi") return cmd_spectral(cfg, true);
  if (c == "bd") return cmd_bd(cfg);
  if (c == "identities") return cmd_identities(cfg);
  if (c == "llt") return cmd_llt(cfg);
  if (c == "simulate") return cmd_simulate(cfg);
  if (c == "sweep") return run_sweep(cfg, resolve_workers(cfg.workers));
  throw ConfigError("unknown command '" + c + "'");
}

}  // namespace zrp::app
