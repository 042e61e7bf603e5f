#include "gamehedge/invariants.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace gamehedge {

namespace {

struct Worst {
  double excess = 0.0;
  std::string where;

  void note(double e, int k, std::size_t node, int zi, int yj) {
    if (e <= excess) return;
    excess = e;
    std::ostringstream os;
    os << "k=" << k << " node=" << node << " zi=" << zi << " yj=" << yj;
    where = os.str();
  }
};

CheckResult verdict(std::string name, const Worst& worst, double tol) {
  CheckResult r{std::move(name), worst.excess <= tol, ""};
  std::ostringstream os;
  os.precision(3);
  if (worst.excess > 0.0) {
    os << "max excess " << worst.excess << " at " << worst.where;
  } else {
    os << "exact";
  }
  r.detail = os.str();
  return r;
}

}  // namespace

bool all_passed(std::span<const CheckResult> results) {
  return std::all_of(results.begin(), results.end(), [](const CheckResult& r) { return r.passed || !r.gating; });
}

namespace {

bool on_cash_grid(std::span<const double> zs, double z) {
  return z > zs.back() || std::binary_search(zs.begin(), zs.end(), z);
}

// Whether every admissible branch at this state reads its successors exactly
// at cash levels.
bool interpolation_free(const SolveContext& ctx, int k, std::size_t node, int zi, int yj) {
  const auto& grid = ctx.grid();
  const auto& ys = grid.y();
  const std::span<const double> zs = grid.z();
  const auto& tree = ctx.layout().tree();
  const double z = zs[static_cast<std::size_t>(zi)];
  const double y = ys[static_cast<std::size_t>(yj)];
  const double price = ctx.price(k, node);
  const double up = ctx.price(k + 1, tree.up_child(k, node));
  const double down = ctx.price(k + 1, tree.down_child(k, node));
  auto branch_exact = [&](double after, double shares) {
    const double z_up = mark_to_market(price, up, after, shares, ctx.friction());
    const double z_down = mark_to_market(price, down, after, shares, ctx.friction());
    if (z_up < 0.0 || z_down < 0.0) return true;  // inadmissible, never evaluated
    return on_cash_grid(zs, z_up) && on_cash_grid(zs, z_down);
  };
  if (!branch_exact(z, y)) return false;
  for (const int target : ctx.trade_order(yj)) {
    const double shares = ys[static_cast<std::size_t>(target)];
    const double after = post_trade_value(price, z, y, shares - y, ctx.friction());
    if (after < 0.0) continue;
    if (!branch_exact(after, shares)) return false;
  }
  return true;
}

}  // namespace

std::vector<CheckResult> check_surface(const Solution& solution, const BinomialLattice& lattice,
                                       const PayoffTables& tables, const FrictionParams& fp,
                                       double lipschitz_tol, double share_tol) {
  const RiskSurface& surface = solution.surface;
  const SolverGrid& grid = surface.grid();
  const auto& zs = grid.z();
  const double max_x = tables.max_seller();
  const SolveContext ctx(lattice, tables, fp, grid);
  const int n = surface.steps();

  Worst bounds;
  Worst floor;
  Worst monotone;
  Worst lipschitz_exact;
  Worst lipschitz_flat;
  Worst lipschitz_interp;
  std::size_t exact_pairs = 0;
  std::size_t interp_pairs = 0;
  for (int k = 0; k <= n; ++k) {
    if (!surface.has_layer(k)) continue;
    const auto nodes = surface.layout().tree().count(k);
    for (std::size_t node = 0; node < nodes; ++node) {
      const double buyer = tables.buyer[static_cast<std::size_t>(k)][node];
      for (int yj = 0; yj < grid.ny(); ++yj) {
        const auto row = surface.cash_row(k, node, yj);
        // The terminal layer has no successors.
        bool exact_here = k == n || interpolation_free(ctx, k, node, 0, yj);
        for (int zi = 0; zi < grid.nz(); ++zi) {
          const double g = row[static_cast<std::size_t>(zi)];
          bounds.note(std::max(-g, g - max_x), k, node, zi, yj);
          floor.note(std::max(buyer - zs[static_cast<std::size_t>(zi)], 0.0) - g, k, node, zi, yj);
          if (zi + 1 >= grid.nz()) continue;
          const double next = row[static_cast<std::size_t>(zi) + 1];
          const double dz = zs[static_cast<std::size_t>(zi) + 1] - zs[static_cast<std::size_t>(zi)];
          monotone.note(next - g, k, node, zi, yj);
          const double excess = g - next - dz;
          const bool exact_next = k == n || interpolation_free(ctx, k, node, zi + 1, yj);
          if (yj == grid.zero_y()) lipschitz_flat.note(excess, k, node, zi, yj);
          if (exact_here && exact_next) {
            ++exact_pairs;
            lipschitz_exact.note(excess, k, node, zi, yj);
          } else {
            ++interp_pairs;
            lipschitz_interp.note(excess - dz, k, node, zi, yj);
          }
          exact_here = exact_next;
        }
      }
    }
  }

  Worst shares;
  const int zero = grid.zero_y();
  for (int yj = 0; yj < grid.ny(); ++yj) {
    for (int zi = 0; zi < grid.nz(); ++zi) {
      shares.note(surface.value(0, 0, zi, yj) - surface.value(0, 0, zi, zero), 0, 0, zi, yj);
    }
  }

  CheckResult exact = verdict("risk 1-Lipschitz in z, interpolation-free pairs", lipschitz_exact, lipschitz_tol);
  exact.detail += " (" + std::to_string(exact_pairs) + " pairs)";
  CheckResult interp =
      verdict("risk 1-Lipschitz in z + one cash step, interpolated pairs", lipschitz_interp, 0.0);
  interp.detail += " (" + std::to_string(interp_pairs) + " pairs)";
  interp.gating = false;
  return {verdict("risk within [0, max X]", bounds, 0.0),
          verdict("risk >= (Y - z)^+", floor, 0.0),
          verdict("risk non-increasing in z", monotone, 0.0),
          std::move(exact),
          verdict("risk 1-Lipschitz in z, no shares held", lipschitz_flat, lipschitz_tol),
          std::move(interp),
          verdict("R(z, y) <= R(z, 0)", shares, share_tol)};
}

std::vector<CheckResult> check_friction_monotonicity(const BinomialLattice& lattice,
                                                     const PayoffTables& tables,
                                                     const SolverGrid& grid,
                                                     const FrictionParams& base,
                                                     std::span<const double> deltas,
                                                     std::span<const double> mus, double tol) {
  auto root_row = [&](const FrictionParams& fp) {
    const Solution sol = solve(lattice, tables, fp, grid, SolveOptions{false});
    const auto row = sol.surface.cash_row(0, 0, grid.zero_y());
    return std::vector<double>(row.begin(), row.end());
  };
  auto sweep = [&](std::string name, std::span<const double> values, bool vary_delta) {
    std::vector<double> sorted(values.begin(), values.end());
    std::sort(sorted.begin(), sorted.end());
    Worst worst;
    std::vector<double> prev;
    for (std::size_t v = 0; v < sorted.size(); ++v) {
      const FrictionParams fp = vary_delta ? FrictionParams(sorted[v], base.mu())
                                           : FrictionParams(base.delta(), sorted[v]);
      std::vector<double> row = root_row(fp);
      if (!prev.empty()) {
        for (std::size_t zi = 0; zi < row.size(); ++zi) {
          worst.note(prev[zi] - row[zi], 0, 0, static_cast<int>(zi), grid.zero_y());
        }
      }
      prev = std::move(row);
    }
    return verdict(std::move(name), worst, tol);
  };
  return {sweep("risk non-decreasing in delta", deltas, true),
          sweep("risk non-decreasing in mu", mus, false)};
}

std::vector<CheckResult> check_simulation(const SimReport& report, double risk, double bias_allowance) {
  std::vector<CheckResult> out;
  {
    std::ostringstream os;
    os << report.admissibility_violations << " of " << report.paths << " paths, worst " << report.worst_violation;
    out.push_back({"lifted hedge admissible", report.admissibility_violations == 0, os.str()});
  }
  for (const StrategyResult& s : report.strategies) {
    const double bound = risk + 3.0 * s.stderr_shortfall + bias_allowance;
    std::ostringstream os;
    os.precision(6);
    os << "mean " << s.mean_shortfall << " vs bound " << bound;
    out.push_back({"shortfall bound (" + s.strategy.name() + ")", s.mean_shortfall <= bound, os.str()});
  }
  return out;
}

std::vector<CheckResult> check_convergence(std::span<const ConvergenceRow> rows, double max_x) {
  Worst bounds;
  bool diffs_ok = true;
  for (std::size_t r = 0; r < rows.size(); ++r) {
    bounds.note(std::max(-rows[r].risk, rows[r].risk - max_x), 0, static_cast<std::size_t>(r), 0, 0);
    if (r > 0 && !(rows[r].diff_prev >= 0.0)) diffs_ok = false;
  }
  return {verdict("risk within [0, max X]", bounds, 0.0),
          {"diff_prev nonnegative", diffs_ok, diffs_ok ? "ok" : "negative or NaN diff"}};
}

}  // namespace gamehedge
