#include "gamehedge/experiments.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace gamehedge {

int convergence_z_points(const ConvergenceConfig& config, int n) {
  const double raw = std::ceil(config.z_points_per_sqrt_n * std::sqrt(static_cast<double>(n)));
  return std::clamp(static_cast<int>(raw), 21, std::max(21, config.z_points_cap));
}

std::vector<ConvergenceRow> run_convergence(const ConvergenceConfig& config, std::span<const int> n_list) {
  if (n_list.empty()) throw std::invalid_argument("experiment.n_list is empty");
  if (!std::is_sorted(n_list.begin(), n_list.end()))
    throw std::invalid_argument("experiment.n_list must be increasing");

  std::vector<ConvergenceRow> rows(n_list.size());
  const auto count = static_cast<std::ptrdiff_t>(n_list.size());
  std::vector<std::string> errors(n_list.size());

#pragma omp parallel for schedule(dynamic)
  for (std::ptrdiff_t r = 0; r < count; ++r) {
    const int n = n_list[static_cast<std::size_t>(r)];
    ConvergenceRow& row = rows[static_cast<std::size_t>(r)];
    try {
      const auto start = std::chrono::steady_clock::now();
      const BinomialLattice lattice(config.market, n);
      const PayoffTables tables = evaluate_on_lattice(config.payoff, lattice);
      GridSettings settings = config.grid;
      settings.z_steps = convergence_z_points(config, n);
      const SolverGrid grid = make_solver_grid(lattice, tables, config.friction, settings, config.z, config.y);
      const Solution solution = solve(lattice, tables, config.friction, grid, SolveOptions{false});
      row.n = n;
      row.risk = query_risk(solution.surface, config.z, config.y);
      row.z_points = grid.nz();
      row.y_points = grid.ny();
      row.z_max = grid.z_max();
      row.wall_ms =
          std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
    } catch (const std::exception& e) {
      errors[static_cast<std::size_t>(r)] = e.what();
    }
  }

  for (std::size_t r = 0; r < rows.size(); ++r) {
    if (!errors[r].empty()) {
      throw std::runtime_error("convergence run failed at n = " + std::to_string(n_list[r]) + ": " + errors[r]);
    }
    rows[r].diff_prev =
        r == 0 ? std::numeric_limits<double>::quiet_NaN() : std::abs(rows[r].risk - rows[r - 1].risk);
  }
  return rows;
}

namespace {
// Successive risks that agree to this relative precision are treated as equal.
constexpr double kRoundoff = 1e-12;
}  // namespace

RateFit fit_rate(std::span<const ConvergenceRow> rows) {
  RateFit fit;
  std::vector<double> xs;
  std::vector<double> ys;
  bool any_diff = false;
  for (const auto& row : rows) {
    if (std::isnan(row.diff_prev)) continue;
    any_diff = true;
    if (row.diff_prev > kRoundoff * std::max(1.0, std::abs(row.risk))) {
      xs.push_back(std::log(static_cast<double>(row.n)));
      ys.push_back(std::log(row.diff_prev));
    }
  }
  fit.points = static_cast<int>(xs.size());
  if (any_diff && xs.empty()) {
    fit.status = RateFit::Status::ExactConvergence;
    return fit;
  }
  if (xs.size() < 2) return fit;

  const double m = static_cast<double>(xs.size());
  double mx = 0.0;
  double my = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    mx += xs[i];
    my += ys[i];
  }
  mx /= m;
  my /= m;
  double sxx = 0.0;
  double sxy = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sxx += (xs[i] - mx) * (xs[i] - mx);
    sxy += (xs[i] - mx) * (ys[i] - my);
  }
  if (sxx == 0.0) return fit;
  fit.status = RateFit::Status::Fitted;
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  return fit;
}

}  // namespace gamehedge
