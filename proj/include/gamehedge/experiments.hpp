#pragma once

#include <span>
#include <vector>

#include "gamehedge/friction.hpp"
#include "gamehedge/model.hpp"
#include "gamehedge/payoff.hpp"
#include "gamehedge/solver.hpp"

namespace gamehedge {

struct ConvergenceConfig {
  MarketParams market;
  FrictionParams friction;
  PayoffPair payoff;
  GridSettings grid;
  double z = 5.0;
  double y = 0.0;
  /// Cash points grow like sqrt(n): ceil(z_points_per_sqrt_n * sqrt(n)), at
  /// least 21 and at most z_points_cap. Share levels stay fixed.
  double z_points_per_sqrt_n = 36.0;
  int z_points_cap = 801;
};

struct ConvergenceRow {
  int n = 0;
  double risk = 0.0;
  double diff_prev = 0.0;  ///< |R_n - R_prev|; NaN on the first row
  double wall_ms = 0.0;
  int z_points = 0;
  int y_points = 0;
  double z_max = 0.0;
};

int convergence_z_points(const ConvergenceConfig& config, int n);

/// One solve per n, rows in n order. Solver errors are rethrown with n named.
std::vector<ConvergenceRow> run_convergence(const ConvergenceConfig& config, std::span<const int> n_list);

struct RateFit {
  enum class Status { Fitted, ExactConvergence, Insufficient };
  Status status = Status::Insufficient;
  double slope = 0.0;
  double intercept = 0.0;
  int points = 0;
};

/// Least squares of log(diff_prev) against log(n) over rows whose diff exceeds
/// round-off (1e-12 relative). When every diff is round-off the status is
/// ExactConvergence; fewer than two usable diffs report Insufficient.
RateFit fit_rate(std::span<const ConvergenceRow> rows);

}  // namespace gamehedge
