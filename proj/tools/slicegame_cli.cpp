// Command-line front end: solve, abrd, verify, sweep, montecarlo.
//
// Exit codes: 0 success, 2 invalid input or failed verification,
// 3 ABRD did not converge (partial results are still written).

#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "slicegame/abrd.hpp"
#include "slicegame/equilibrium.hpp"
#include "slicegame/experiments.hpp"
#include "slicegame/io.hpp"
#include "slicegame/sweeps.hpp"
#include "slicegame/verify.hpp"

using namespace slicegame;

namespace {

constexpr int kOk = 0;
constexpr int kInvalid = 2;
constexpr int kNotConverged = 3;

struct Options {
  std::string scenario_path;
  std::string config_path;
  std::string family_path;
  std::string out_path;
  std::string format = "json";
  std::optional<std::uint64_t> seed;
  std::optional<double> tolerance;
  std::optional<int> replications;
  std::optional<int> max_rounds;
  std::optional<int> br_iters;
  std::string br_method;
  bool deterministic = false;
  // abrd
  std::string trajectory_path;
  // sweep
  std::string kind;
  std::optional<int> grid_points;
  std::optional<double> alpha;
  std::optional<int> tenants;
  std::optional<int> max_tenants;
  // montecarlo
  std::optional<int> cells;
  std::optional<double> gamma_min;
  std::optional<double> gamma_max;
  std::string histogram_prefix;
  bool serial = false;
  bool include_samples = false;
};

AbrdConfig load_abrd_config(const Options &o) {
  AbrdConfig c = o.config_path.empty() ? AbrdConfig{} : abrd_config_from_json(read_json_file(o.config_path));
  if (o.tolerance) c.tolerance = *o.tolerance;
  if (o.max_rounds) c.max_rounds = *o.max_rounds;
  if (o.br_iters) c.br_iters = *o.br_iters;
  if (o.seed) c.rng_seed = *o.seed;
  if (o.br_method == "gradient") c.br_method = BestResponseMethod::gradient;
  if (o.br_method == "heuristic") c.br_method = BestResponseMethod::heuristic;
  c.validate();
  return c;
}

Scenario load_scenario(const Options &o) { return scenario_from_json(read_json_file(o.scenario_path)); }

// Writes to --out, or stdout when no path is given.
void emit(const Options &o, const std::string &text) {
  if (o.out_path.empty() || o.out_path == "-") {
    std::cout << text;
    return;
  }
  std::ofstream out(o.out_path);
  if (!out) throw ValidationError(o.out_path + ": cannot open for writing");
  out << text;
}

Table result_table(const Scenario &sc, const EquilibriumResult &r) {
  Table t{{"tenant", "cell", "weight", "sigma", "rho", "subscribers", "per_user_resources"}, {}};
  for (std::size_t i = 0; i < sc.num_tenants(); ++i)
    for (std::size_t j = 0; j < sc.num_cells(); ++j)
      t.rows.push_back({static_cast<double>(i), static_cast<double>(j), r.weights(i, j), r.state.sigma[j],
                        r.state.rho(j, i), r.state.subscribers(j, i), r.state.per_user_resources(j, i)});
  return t;
}

void emit_result(const Options &o, const Scenario &sc, const EquilibriumResult &r, const Json &meta) {
  std::ostringstream os;
  if (o.format == "csv") {
    Json m = meta;
    m["kkt_residual"] = r.kkt_residual;
    m["budget_residual"] = r.budget_residual;
    m["converged"] = r.diagnostics.converged;
    write_csv(os, result_table(sc, r), m);
  } else {
    os << Json{{"metadata", meta}, {"scenario", to_json(sc)}, {"result", to_json(r)}}.dump(2) << '\n';
  }
  emit(o, os.str());
}

int run_solve(const Options &o) {
  const Scenario sc = load_scenario(o);
  const EquilibriumResult r = proposed_solution(sc);
  const Json meta = metadata({{"command", "solve"}, {"exact", r.diagnostics.homogeneous}}, o.deterministic);
  emit_result(o, sc, r, meta);
  return kOk;
}

int run_abrd(const Options &o) {
  const Scenario sc = load_scenario(o);
  const AbrdConfig cfg = load_abrd_config(o);
  std::ofstream trajectory;
  AbrdObserver observer;
  if (!o.trajectory_path.empty()) {
    trajectory.open(o.trajectory_path);
    if (!trajectory) throw ValidationError(o.trajectory_path + ": cannot open for writing");
    observer = [&](int round, std::size_t tenant, const WeightProfile &w) {
      trajectory << Json{{"round", round}, {"tenant", tenant}, {"weights", to_json(w)}}.dump() << '\n';
    };
  }
  const EquilibriumResult r = abrd(sc, cfg, observer);
  const Json meta = metadata({{"command", "abrd"}, {"seed", cfg.rng_seed}, {"config", to_json(cfg)}}, o.deterministic);
  emit_result(o, sc, r, meta);
  if (!r.diagnostics.converged) {
    std::cerr << "abrd: no convergence after " << r.diagnostics.rounds << " rounds\n";
    return kNotConverged;
  }
  return kOk;
}

int run_verify(const Options &o) {
  const Scenario sc = load_scenario(o);
  const AbrdConfig cfg = load_abrd_config(o);
  const std::vector<CheckResult> checks = verify_scenario(sc, cfg);
  bool all = true;
  Json list = Json::array();
  std::ostringstream text;
  for (const CheckResult &c : checks) {
    all = all && c.passed;
    text << (c.passed ? "PASS " : "FAIL ") << c.name << " value=" << format_number(c.value)
         << " threshold=" << format_number(c.threshold) << '\n';
    list.push_back({{"name", c.name}, {"passed", c.passed}, {"value", c.value}, {"threshold", c.threshold}});
  }
  std::cout << text.str();
  if (!o.out_path.empty()) {
    const Json meta = metadata({{"command", "verify"}, {"seed", cfg.rng_seed}}, o.deterministic);
    emit(o, Json{{"metadata", meta}, {"checks", list}, {"passed", all}}.dump(2) + "\n");
  }
  return all ? kOk : kInvalid;
}

int run_sweep(const Options &o) {
  const SweepKind kind = sweep_kind_from_string(o.kind);
  SweepParams p;
  p.abrd = load_abrd_config(o);
  if (o.grid_points) p.grid_points = *o.grid_points;
  if (o.alpha) p.alpha = *o.alpha;
  if (o.tenants) p.num_tenants = *o.tenants;
  if (o.max_tenants) p.max_tenants = *o.max_tenants;
  const Table t = sweep(kind, p);
  const Json meta = metadata({{"command", "sweep"}, {"kind", std::string(to_string(kind))}, {"seed", p.abrd.rng_seed}},
                             o.deterministic);
  std::ostringstream os;
  if (o.format == "csv") {
    write_csv(os, t, meta);
  } else {
    os << Json{{"metadata", meta}, {"columns", t.columns}, {"rows", t.rows}}.dump(2) << '\n';
  }
  emit(o, os.str());
  return kOk;
}

int run_montecarlo(const Options &o) {
  ScenarioFamily f = o.family_path.empty() ? ScenarioFamily{} : family_from_json(read_json_file(o.family_path));
  if (o.tenants) f.num_tenants = *o.tenants;
  if (o.cells) f.num_cells = *o.cells;
  if (o.alpha) f.alpha = *o.alpha;
  if (o.gamma_min) f.gamma_min = *o.gamma_min;
  if (o.gamma_max) f.gamma_max = *o.gamma_max;
  if (o.replications) f.replications = *o.replications;
  if (o.seed) f.rng_seed = *o.seed;
  f.validate();
  const AbrdConfig cfg = load_abrd_config(o);
  const DeviationReport rep = o.serial ? deviation_study_serial(f, cfg) : deviation_study(f, cfg);

  const Json meta = metadata(
      {{"command", "montecarlo"}, {"seed", f.rng_seed}, {"family", to_json(f)}, {"abrd_config", to_json(cfg)}},
      o.deterministic);
  std::ostringstream os;
  if (o.format == "csv") {
    Table t{{"replications", "failed_replications", "rho_p90_percent", "rho_p95_percent", "sigma_p90_percent",
             "sigma_p95_percent"},
            {{static_cast<double>(rep.replications), static_cast<double>(rep.failed_replications),
              100.0 * rep.rho_abs.p90, 100.0 * rep.rho_abs.p95, 100.0 * rep.sigma_abs.p90, 100.0 * rep.sigma_abs.p95}}};
    write_csv(os, t, meta);
  } else {
    os << Json{{"metadata", meta}, {"report", to_json(rep, o.include_samples)}}.dump(2) << '\n';
  }
  emit(o, os.str());
  if (!o.histogram_prefix.empty()) {
    for (const auto &[suffix, bins] : {std::pair{"_rho.csv", &rep.rho_histogram}, {"_sigma.csv", &rep.sigma_histogram}}) {
      std::ofstream h(o.histogram_prefix + suffix);
      if (!h) throw ValidationError(o.histogram_prefix + suffix + ": cannot open for writing");
      write_histogram_csv(h, *bins, meta);
    }
  }
  if (rep.failed_replications > 0) {
    std::cerr << "montecarlo: " << rep.failed_replications << " replication(s) did not converge\n";
    return kNotConverged;
  }
  return kOk;
}

} // namespace

int main(int argc, char **argv) {
  CLI::App app{"Tenant weight competition in network slicing: equilibria and deviation studies"};
  app.require_subcommand(1);
  Options o;

  auto add_common = [&](CLI::App *sub) {
    sub->add_option("--out", o.out_path, "Output file (default: stdout)");
    sub->add_option("--format", o.format, "Output format")->check(CLI::IsMember({"json", "csv"}));
    sub->add_option("--seed", o.seed, "RNG seed override");
    sub->add_flag("--deterministic", o.deterministic, "Omit the timestamp from output metadata");
  };
  auto add_abrd = [&](CLI::App *sub) {
    sub->add_option("--config", o.config_path, "ABRD config JSON");
    sub->add_option("--tolerance", o.tolerance, "ABRD convergence tolerance");
    sub->add_option("--max-rounds", o.max_rounds, "ABRD round cap");
    sub->add_option("--br-iters", o.br_iters, "Best-response iteration budget");
    sub->add_option("--br-method", o.br_method, "Best-response optimizer")
        ->check(CLI::IsMember({"gradient", "heuristic"}));
  };

  CLI::App *solve = app.add_subcommand("solve", "Proposed closed-form solution");
  solve->add_option("--scenario", o.scenario_path, "Scenario JSON")->required();
  add_common(solve);

  CLI::App *abrd_cmd = app.add_subcommand("abrd", "Asynchronous best-response dynamics");
  abrd_cmd->add_option("--scenario", o.scenario_path, "Scenario JSON")->required();
  abrd_cmd->add_option("--trajectory", o.trajectory_path, "Per-step weights as JSON lines");
  add_common(abrd_cmd);
  add_abrd(abrd_cmd);

  CLI::App *verify = app.add_subcommand("verify", "Numerical self-checks on a scenario");
  verify->add_option("--scenario", o.scenario_path, "Scenario JSON")->required();
  add_common(verify);
  add_abrd(verify);

  CLI::App *sweep_cmd = app.add_subcommand("sweep", "Parameter sweeps");
  sweep_cmd->add_option("--kind", o.kind, "sigma_vs_S_alpha | sigma_vs_S_gamma | rho1_vs_share_bounds | "
                                          "sigma_vs_share_equality | het_profile")
      ->required();
  sweep_cmd->add_option("--grid-points", o.grid_points, "Points on continuous axes");
  sweep_cmd->add_option("--alpha", o.alpha, "User sensitivity");
  sweep_cmd->add_option("--tenants", o.tenants, "Number of tenants");
  sweep_cmd->add_option("--max-tenants", o.max_tenants, "Largest tenant count");
  add_common(sweep_cmd);
  add_abrd(sweep_cmd);

  CLI::App *mc = app.add_subcommand("montecarlo", "Deviation of the proposed solution from ABRD");
  mc->add_option("--family", o.family_path, "Scenario family JSON");
  mc->add_option("--tenants", o.tenants, "Number of tenants");
  mc->add_option("--cells", o.cells, "Number of cells");
  mc->add_option("--alpha", o.alpha, "User sensitivity");
  mc->add_option("--gamma-min", o.gamma_min, "Lower end of the normalized capacity range");
  mc->add_option("--gamma-max", o.gamma_max, "Upper end of the normalized capacity range");
  mc->add_option("--replications", o.replications, "Number of scenarios");
  mc->add_option("--histogram", o.histogram_prefix, "Write <prefix>_rho.csv and <prefix>_sigma.csv");
  mc->add_flag("--serial", o.serial, "Use the single-threaded reference loop");
  mc->add_flag("--include-samples", o.include_samples, "Add raw deviations to the JSON report");
  add_common(mc);
  add_abrd(mc);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp &e) {
    return app.exit(e);
  } catch (const CLI::ParseError &e) {
    app.exit(e);
    return kInvalid;
  }

  try {
    if (*solve) return run_solve(o);
    if (*abrd_cmd) return run_abrd(o);
    if (*verify) return run_verify(o);
    if (*sweep_cmd) return run_sweep(o);
    if (*mc) return run_montecarlo(o);
  } catch (const ValidationError &e) {
    std::cerr << "error: " << e.what() << '\n';
    return kInvalid;
  } catch (const Json::exception &e) {
    std::cerr << "error: " << e.what() << '\n';
    return kInvalid;
  } catch (const ConvergenceError &e) {
    std::cerr << "error: " << e.what() << '\n';
    return kNotConverged;
  }
  return kInvalid;
}
