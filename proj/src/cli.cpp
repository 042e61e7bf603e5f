#include "gamehedge/cli.hpp"

#include <CLI11.hpp>

#include <cmath>
#include <filesystem>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include "gamehedge/config.hpp"
#include "gamehedge/csv.hpp"
#include "gamehedge/errors.hpp"
#include "gamehedge/experiments.hpp"
#include "gamehedge/invariants.hpp"
#include "gamehedge/lift.hpp"
#include "gamehedge/oracle.hpp"
#include "gamehedge/solver.hpp"

namespace gamehedge {

namespace {

namespace fs = std::filesystem;

struct Flags {
  std::string config;
  std::string out = ".";
  bool check = false;
  bool trace = false;
  bool timing = false;
  std::optional<std::uint64_t> seed;
};

struct Instance {
  RunConfig config;
  BinomialLattice lattice;
  FrictionParams friction;
  PayoffTables tables;
  SolverGrid grid;
};

Instance load_instance(const Flags& flags) {
  RunConfig config = load_config(flags.config);
  if (flags.seed) config.sim.seed = *flags.seed;
  const BinomialLattice lattice(config.market_params(), config.solver.n);
  const FrictionParams friction = config.friction_params();
  PayoffTables tables = evaluate_on_lattice(config.payoff, lattice);
  SolverGrid grid =
      make_solver_grid(lattice, tables, friction, config.solver.grid, config.position.z, config.position.y);
  if (grid.find_y(config.position.y) < 0) {
    std::ostringstream os;
    os << "position.y: " << config.position.y << " is not a share level of the solver grid (step "
       << (grid.ny() > 1 ? grid.y()[1] - grid.y()[0] : 0.0) << ")";
    throw ConfigError(os.str());
  }
  return {std::move(config), lattice, friction, std::move(tables), std::move(grid)};
}

fs::path output_dir(const Flags& flags) {
  fs::path dir(flags.out);
  fs::create_directories(dir);
  return dir;
}

template <class Writer>
void emit(const fs::path& path, Writer&& writer) {
  std::ostringstream os;
  writer(os);
  write_file(path, os.str());
  std::cout << "wrote " << path.string() << '\n';
}

void report_checks(const std::vector<CheckResult>& results) {
  for (const auto& r : results) {
    const char* tag = r.passed ? "ok  " : (r.gating ? "FAIL" : "note");
    std::cout << "check " << tag << "  " << r.name << ": " << r.detail << '\n';
  }
  if (!all_passed(results)) throw ContractViolation("invariant checks failed");
}

double checked_risk(const Solution& solution, const Instance& inst) {
  return query_risk(solution.surface, inst.config.position.z, inst.config.position.y);
}

std::vector<CheckResult> surface_checks(const Solution& solution, const Instance& inst, bool friction_sweep) {
  std::vector<CheckResult> results = check_surface(solution, inst.lattice, inst.tables, inst.friction);
  if (friction_sweep) {
    const double d = inst.friction.delta();
    const double m = inst.friction.mu();
    const std::vector<double> deltas{0.5 * d, d, 2.0 * d};
    std::vector<double> mus{0.5 * m, m};
    if (2.0 * m < 1.0) mus.push_back(2.0 * m);
    auto sweep = check_friction_monotonicity(inst.lattice, inst.tables, inst.grid, inst.friction, deltas, mus);
    results.insert(results.end(), sweep.begin(), sweep.end());
  }
  return results;
}

int cmd_risk(const Flags& flags) {
  const Instance inst = load_instance(flags);
  const bool all_layers = inst.config.output.full_surface || flags.check;
  const Solution solution = solve(inst.lattice, inst.tables, inst.friction, inst.grid, SolveOptions{all_layers});
  const double risk = checked_risk(solution, inst);
  std::cout << "R_n(z, y) = " << format_double(risk) << "  (n = " << inst.config.solver.n
            << ", z = " << format_double(inst.config.position.z) << ", y = " << format_double(inst.config.position.y)
            << ")\n";
  const fs::path dir = output_dir(flags);
  emit(dir / "surface.csv",
       [&](std::ostream& os) { write_surface_csv(os, solution, !inst.config.output.full_surface); });
  if (flags.check) report_checks(surface_checks(solution, inst, true));
  return 0;
}

int cmd_policy(const Flags& flags) {
  const Instance inst = load_instance(flags);
  const Solution solution = solve(inst.lattice, inst.tables, inst.friction, inst.grid, SolveOptions{flags.check});
  const int zi = inst.grid.floor_z(inst.config.position.z);
  const Decision& d = solution.policy.at(0, 0, std::max(zi, 0), inst.grid.find_y(inst.config.position.y));
  std::cout << "action at (z, y) = " << to_string(d.action) << (d.buyer_stop ? " (buyer stops)" : "") << '\n';
  const fs::path dir = output_dir(flags);
  emit(dir / "policy.csv", [&](std::ostream& os) { write_policy_csv(os, solution); });
  if (flags.check) report_checks(surface_checks(solution, inst, false));
  return 0;
}

int cmd_simulate(const Flags& flags) {
  const Instance inst = load_instance(flags);
  const Solution solution = solve(inst.lattice, inst.tables, inst.friction, inst.grid);
  const double risk = checked_risk(solution, inst);
  SimOptions options = inst.config.sim_options();
  options.trace = flags.trace;
  const SimReport report = lift_and_simulate(solution, inst.lattice, inst.friction, inst.config.payoff,
                                             inst.config.position.z, inst.config.position.y,
                                             inst.config.buyers(), options);
  std::cout << "R_n(z, y) = " << format_double(risk) << "; paths " << report.paths << ", incomplete "
            << report.incomplete_embeddings << ", violations " << report.admissibility_violations
            << ", value_match_error " << format_double(report.value_match_error) << ", growth_stat "
            << format_double(report.growth_stat) << '\n';
  for (const auto& s : report.strategies) {
    std::cout << "  " << s.strategy.name() << ": mean shortfall " << format_double(s.mean_shortfall) << " +- "
              << format_double(s.stderr_shortfall) << '\n';
  }
  const fs::path dir = output_dir(flags);
  emit(dir / "sim.csv", [&](std::ostream& os) { write_sim_csv(os, report); });
  if (flags.trace) {
    emit(dir / "trace.csv", [&](std::ostream& os) { write_trace_csv(os, report); });
    emit(dir / "paths.csv", [&](std::ostream& os) { write_path_summary_csv(os, report); });
  }
  if (flags.check) report_checks(check_simulation(report, risk));
  return 0;
}

int cmd_converge(const Flags& flags) {
  RunConfig config = load_config(flags.config);
  const auto& n_list = config.experiment.n_list;
  const std::vector<ConvergenceRow> rows = run_convergence(config.convergence_config(), n_list);
  const RateFit fit = fit_rate(rows);
  for (const auto& r : rows) {
    std::cout << "n = " << r.n << "  R_n = " << format_double(r.risk) << "  diff = " << format_double(r.diff_prev)
              << "  (" << r.z_points << " x " << r.y_points << " grid, " << std::lround(r.wall_ms) << " ms)\n";
  }
  switch (fit.status) {
    case RateFit::Status::Fitted:
      std::cout << "fitted slope " << format_double(fit.slope) << " over " << fit.points << " diffs\n";
      break;
    case RateFit::Status::ExactConvergence:
      std::cout << "exact convergence: every successive difference is zero\n";
      break;
    case RateFit::Status::Insufficient:
      std::cout << "too few nonzero differences to fit a rate\n";
      break;
  }
  const fs::path dir = output_dir(flags);
  emit(dir / "convergence.csv", [&](std::ostream& os) { write_convergence_csv(os, rows, flags.timing); });
  emit(dir / "convergence_fit.csv", [&](std::ostream& os) { write_rate_fit_csv(os, fit); });
  if (flags.check) {
    const BinomialLattice largest(config.market_params(), n_list.back());
    report_checks(check_convergence(rows, evaluate_on_lattice(config.payoff, largest).max_seller()));
  }
  return 0;
}

int cmd_oracle(const Flags& flags) {
  const Instance inst = load_instance(flags);
  if (inst.config.solver.n > 3) throw ConfigError("solver.n: oracle-check needs n <= 3");
  const Solution solution = solve(inst.lattice, inst.tables, inst.friction, inst.grid);
  const TinyInstance tiny{inst.lattice, inst.friction, inst.config.payoff, inst.grid};
  double worst = 0.0;
  std::ostringstream csv;
  csv << "z,y,solver,oracle,abs_diff\n";
  OracleStats stats;
  for (int yj = 0; yj < inst.grid.ny(); ++yj) {
    for (int zi = 0; zi < inst.grid.nz(); ++zi) {
      const double z = inst.grid.z()[static_cast<std::size_t>(zi)];
      const double y = inst.grid.y()[static_cast<std::size_t>(yj)];
      const double mine = solution.surface.value(0, 0, zi, yj);
      const double exact = brute_force_risk(tiny, z, y, {}, &stats);
      const double diff = std::abs(mine - exact);
      worst = std::max(worst, diff);
      csv << format_double(z) << ',' << format_double(y) << ',' << format_double(mine) << ','
          << format_double(exact) << ',' << format_double(diff) << '\n';
    }
  }
  std::cout << "oracle leaf bound " << stats.leaf_bound << " per state; " << inst.grid.nz() * inst.grid.ny()
            << " states; max |solver - oracle| = " << format_double(worst) << '\n';
  emit(output_dir(flags) / "oracle_check.csv", [&](std::ostream& os) { os << csv.str(); });
  if (worst > 1e-12) throw ContractViolation("solver and oracle disagree by " + format_double(worst));
  return 0;
}

}  // namespace

int run_cli(int argc, char** argv) {
  CLI::App app{"Shortfall-risk hedging of game options under transaction costs"};
  app.require_subcommand(1);
  Flags flags;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", flags.config, "INI run configuration")->required();
    sub->add_option("--out", flags.out, "output directory");
    sub->add_flag("--check", flags.check, "run invariant checks; exit 3 on failure");
    sub->add_option_function<std::uint64_t>(
        "--seed", [&](const std::uint64_t& s) { flags.seed = s; }, "override sim.seed");
  };

  CLI::App* risk = app.add_subcommand("risk", "solve and write the risk surface");
  CLI::App* policy = app.add_subcommand("policy", "solve and write the root policy");
  CLI::App* simulate = app.add_subcommand("simulate", "lift the hedge and simulate it");
  CLI::App* converge = app.add_subcommand("converge", "convergence study over experiment.n_list");
  CLI::App* oracle = app.add_subcommand("oracle-check", "compare the solver with brute force (n <= 3)");
  for (CLI::App* sub : {risk, policy, simulate, converge, oracle}) add_common(sub);
  simulate->add_flag("--trace", flags.trace, "write per-path trace.csv and paths.csv");
  converge->add_flag("--timing", flags.timing, "record measured wall_ms in the CSV");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (*risk) return cmd_risk(flags);
    if (*policy) return cmd_policy(flags);
    if (*simulate) return cmd_simulate(flags);
    if (*converge) return cmd_converge(flags);
    if (*oracle) return cmd_oracle(flags);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 2;
  } catch (const ContractViolation& e) {
    std::cerr << "contract violation: " << e.what() << '\n';
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 1;
}

}  // namespace gamehedge
