#pragma once

#include <span>
#include <string>
#include <vector>

#include "gamehedge/experiments.hpp"
#include "gamehedge/friction.hpp"
#include "gamehedge/lift.hpp"
#include "gamehedge/model.hpp"
#include "gamehedge/payoff.hpp"
#include "gamehedge/solver.hpp"

namespace gamehedge {

struct CheckResult {
  std::string name;
  bool passed = true;
  std::string detail;  ///< worst offender or a summary
  bool gating = true;  ///< diagnostics are reported but never fail a run
};

/// True when every gating check passed.
bool all_passed(std::span<const CheckResult> results);

/// Bounds 0 <= G <= max X, G >= (Y - z)^+, monotone non-increasing in z,
/// R(z, y) <= R(z, 0) at the root, and 1-Lipschitz in z between adjacent cash
/// levels. Needs every surface layer.
///
/// The Lipschitz bound is gated with lipschitz_tol on pairs of states whose
/// successors all land on cash levels (no interpolation), and on every state
/// with no shares. Elsewhere it is a diagnostic with tolerance one cash step:
/// with a fixed fee, a state holding shares can jump by about delta where a
/// small loss of cash makes holding inadmissible and forces a trade.
std::vector<CheckResult> check_surface(const Solution& solution, const BinomialLattice& lattice,
                                       const PayoffTables& tables, const FrictionParams& fp,
                                       double lipschitz_tol = 1e-9, double share_tol = 1e-6);

/// Risk at the root with no shares must not decrease when either friction
/// parameter grows. Solves once per value on the shared grid; each sweep varies
/// one parameter with the other held at `base`.
std::vector<CheckResult> check_friction_monotonicity(const BinomialLattice& lattice,
                                                     const PayoffTables& tables,
                                                     const SolverGrid& grid,
                                                     const FrictionParams& base,
                                                     std::span<const double> deltas,
                                                     std::span<const double> mus,
                                                     double tol = 1e-6);

/// Zero admissibility violations and, per buyer strategy,
/// mean shortfall <= risk + 3 stderr + bias_allowance.
std::vector<CheckResult> check_simulation(const SimReport& report, double risk,
                                          double bias_allowance = 0.05);

/// Risks inside [0, max_x] and nonnegative successive differences.
std::vector<CheckResult> check_convergence(std::span<const ConvergenceRow> rows, double max_x);

}  // namespace gamehedge
