#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <memory>
#include <optional>
#include <string>

#include "gamehedge/config.hpp"
#include "gamehedge/errors.hpp"
#include "gamehedge/experiments.hpp"
#include "gamehedge/invariants.hpp"
#include "gamehedge/lift.hpp"
#include "gamehedge/oracle.hpp"
#include "gamehedge/solver.hpp"

namespace py = pybind11;
using namespace gamehedge;

namespace {

// A solved instance that owns everything the surface and policy refer to.
struct Solved {
  RunConfig config;
  BinomialLattice lattice;
  FrictionParams friction;
  PayoffTables tables;
  SolverGrid grid;
  Solution solution;

  explicit Solved(RunConfig c)
      : config(std::move(c)),
        lattice(config.market_params(), config.solver.n),
        friction(config.friction_params()),
        tables(evaluate_on_lattice(config.payoff, lattice)),
        grid(make_solver_grid(lattice, tables, friction, config.solver.grid, config.position.z, config.position.y)),
        solution(solve(lattice, tables, friction, grid)) {}

  double risk(double z, double y) const { return query_risk(solution.surface, z, y); }

  std::vector<double> root_values(double y) const {
    const int yj = grid.find_y(y);
    if (yj < 0) throw std::invalid_argument("y is not a share level of the grid");
    const auto row = solution.surface.cash_row(0, 0, yj);
    return {row.begin(), row.end()};
  }

  py::dict decision(int k, std::size_t node, int zi, int yj) const {
    const Decision& d = solution.policy.at(k, node, zi, yj);
    py::dict out;
    out["action"] = std::string(to_string(d.action));
    out["buyer_stop"] = d.buyer_stop;
    out["target_y"] = d.action == Action::Trade ? py::cast(grid.y()[static_cast<std::size_t>(d.target)])
                                                 : py::none();
    return out;
  }

  py::list checks() const {
    py::list out;
    for (const auto& c : check_surface(solution, lattice, tables, friction)) {
      py::dict d;
      d["name"] = c.name;
      d["passed"] = c.passed;
      d["gating"] = c.gating;
      d["detail"] = c.detail;
      out.append(d);
    }
    return out;
  }

  py::dict simulate(std::optional<std::uint64_t> seed, std::optional<int> paths) const {
    SimOptions options = config.sim_options();
    if (seed) options.seed = *seed;
    if (paths) options.num_paths = *paths;
    SimReport r;
    {
      py::gil_scoped_release release;
      r = lift_and_simulate(solution, lattice, friction, config.payoff, config.position.z, config.position.y,
                            config.buyers(), options);
    }
    py::dict out;
    out["paths"] = r.paths;
    out["incomplete"] = r.incomplete_embeddings;
    out["violations"] = r.admissibility_violations;
    out["policy_fallbacks"] = r.policy_fallbacks;
    out["value_match_error"] = r.value_match_error;
    out["growth_stat"] = r.growth_stat;
    py::dict strategies;
    for (const auto& s : r.strategies) strategies[py::str(s.strategy.name())] = py::make_tuple(s.mean_shortfall, s.stderr_shortfall);
    out["shortfall"] = strategies;
    return out;
  }
};

py::dict rate_dict(const RateFit& fit) {
  py::dict d;
  switch (fit.status) {
    case RateFit::Status::Fitted:
      d["status"] = "fitted";
      break;
    case RateFit::Status::ExactConvergence:
      d["status"] = "exact_convergence";
      break;
    case RateFit::Status::Insufficient:
      d["status"] = "insufficient";
      break;
  }
  d["slope"] = fit.slope;
  d["intercept"] = fit.intercept;
  d["points"] = fit.points;
  return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Shortfall-risk hedging of game options under transaction costs";

  py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);
  py::register_exception<ContractViolation>(m, "ContractViolation", PyExc_RuntimeError);
  py::register_exception<SizeError>(m, "SizeError", PyExc_RuntimeError);

  py::class_<RunConfig>(m, "Config")
      .def_static("from_file", [](const std::string& path) { return load_config(path); })
      .def_static("from_ini", [](const std::string& text) { return parse_config(text); })
      .def("to_ini", [](const RunConfig& c) { return write_config(c); })
      .def_property(
          "n", [](const RunConfig& c) { return c.solver.n; }, [](RunConfig& c, int n) { c.solver.n = n; })
      .def_property(
          "z", [](const RunConfig& c) { return c.position.z; }, [](RunConfig& c, double z) { c.position.z = z; })
      .def_property(
          "y", [](const RunConfig& c) { return c.position.y; }, [](RunConfig& c, double y) { c.position.y = y; })
      .def_property(
          "n_list", [](const RunConfig& c) { return c.experiment.n_list; },
          [](RunConfig& c, std::vector<int> ns) { c.experiment.n_list = std::move(ns); })
      .def("__eq__", [](const RunConfig& a, const RunConfig& b) { return a == b; });

  py::class_<Solved>(m, "Solution")
      .def_property_readonly("z_grid", [](const Solved& s) { return s.grid.z(); })
      .def_property_readonly("y_grid", [](const Solved& s) { return s.grid.y(); })
      .def_property_readonly("max_x", [](const Solved& s) { return s.tables.max_seller(); })
      .def("risk", &Solved::risk, py::arg("z"), py::arg("y") = 0.0, "R_n(z, y) at the root, interpolated in z")
      .def("root_values", &Solved::root_values, py::arg("y") = 0.0)
      .def("decision", &Solved::decision, py::arg("k"), py::arg("node"), py::arg("z_index"), py::arg("y_index"))
      .def("checks", &Solved::checks)
      .def("simulate", &Solved::simulate, py::arg("seed") = py::none(), py::arg("paths") = py::none());

  m.def(
      "solve",
      [](const RunConfig& config) {
        py::gil_scoped_release release;
        return std::make_unique<Solved>(config);
      },
      py::arg("config"));

  m.def(
      "oracle_risk",
      [](const RunConfig& c, double z, double y) {
        const BinomialLattice lattice(c.market_params(), c.solver.n);
        const PayoffTables tables = evaluate_on_lattice(c.payoff, lattice);
        const FrictionParams fp = c.friction_params();
        SolverGrid grid = make_solver_grid(lattice, tables, fp, c.solver.grid, c.position.z, c.position.y);
        return brute_force_risk(TinyInstance{lattice, fp, c.payoff, std::move(grid)}, z, y);
      },
      py::arg("config"), py::arg("z"), py::arg("y") = 0.0, "Brute-force risk on the config's grid (n <= 3)");

  m.def(
      "convergence",
      [](const RunConfig& c) {
        std::vector<ConvergenceRow> rows;
        {
          py::gil_scoped_release release;
          rows = run_convergence(c.convergence_config(), c.experiment.n_list);
        }
        py::list out;
        for (const auto& r : rows) {
          py::dict d;
          d["n"] = r.n;
          d["risk"] = r.risk;
          d["diff_prev"] = r.diff_prev;
          d["wall_ms"] = r.wall_ms;
          out.append(d);
        }
        return py::make_tuple(out, rate_dict(fit_rate(rows)));
      },
      py::arg("config"));

  m.def(
      "up_prob",
      [](double kappa, double vartheta, double T, int n) {
        return binomial_up_prob(MarketParams(100.0, kappa, vartheta, T), n);
      },
      py::arg("kappa"), py::arg("vartheta"), py::arg("T"), py::arg("n"));
}
