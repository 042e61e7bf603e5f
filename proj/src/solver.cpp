#include "gamehedge/solver.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <string>

#include "gamehedge/errors.hpp"

namespace gamehedge {

SolverGrid::SolverGrid(std::vector<double> z, std::vector<double> y) : z_(std::move(z)), y_(std::move(y)) {
  if (z_.size() < 2) throw std::invalid_argument("cash grid needs at least two points");
  if (z_.front() != 0.0) throw std::invalid_argument("cash grid must start at 0");
  if (std::adjacent_find(z_.begin(), z_.end(), std::greater_equal<>()) != z_.end())
    throw std::invalid_argument("cash grid must be strictly increasing");
  if (y_.empty()) throw std::invalid_argument("share grid is empty");
  if (std::adjacent_find(y_.begin(), y_.end(), std::greater_equal<>()) != y_.end())
    throw std::invalid_argument("share grid must be strictly increasing");
  if (y_.size() > static_cast<std::size_t>(std::numeric_limits<std::int16_t>::max()))
    throw std::invalid_argument("share grid too large");
  zero_y_ = find_y(0.0);
  if (zero_y_ < 0) throw std::invalid_argument("share grid must contain 0");
}

SolverGrid SolverGrid::uniform(double z_max, int z_points, double y_max, int y_points) {
  if (!(z_max > 0.0)) throw std::invalid_argument("z_max must be > 0");
  if (z_points < 2) throw std::invalid_argument("z_steps must be >= 2");
  if (y_points < 1 || y_points % 2 == 0) throw std::invalid_argument("y_steps must be odd");
  if (y_points > 1 && !(y_max > 0.0)) throw std::invalid_argument("y_max must be > 0");

  std::vector<double> z(static_cast<std::size_t>(z_points));
  for (int i = 0; i < z_points; ++i) z[static_cast<std::size_t>(i)] = z_max * i / (z_points - 1);
  z.back() = z_max;

  std::vector<double> y(static_cast<std::size_t>(y_points), 0.0);
  const int half = (y_points - 1) / 2;
  for (int j = 0; j < y_points; ++j) {
    if (half > 0) y[static_cast<std::size_t>(j)] = y_max * (j - half) / half;
  }
  return SolverGrid(std::move(z), std::move(y));
}

int SolverGrid::find_y(double y) const {
  const auto it = std::lower_bound(y_.begin(), y_.end(), y);
  if (it == y_.end() || *it != y) return -1;
  return static_cast<int>(it - y_.begin());
}

int SolverGrid::floor_z(double z) const {
  const auto it = std::upper_bound(z_.begin(), z_.end(), z);
  return std::max(0, static_cast<int>(it - z_.begin()) - 1);
}

double share_bound(const BinomialLattice& lattice, const FrictionParams& fp, double z0, double y0) {
  const double s = lattice.market().s();
  return std::ceil((z0 + (1.0 + fp.mu()) * std::abs(y0) * s + 1.0) / (fp.mu() * lattice.min_price()));
}

SolverGrid make_solver_grid(const BinomialLattice& lattice, const PayoffTables& tables,
                            const FrictionParams& fp, const GridSettings& settings, double z0,
                            double y0) {
  const double z_max =
      settings.z_max > 0.0 ? settings.z_max : settings.z_max_factor * tables.max_seller();
  if (!(z_max > 0.0)) throw std::invalid_argument("cash ceiling must be > 0 (all payoffs vanish?)");
  double y_max = share_bound(lattice, fp, z0, y0);
  if (settings.y_max_cap > 0.0) y_max = std::min(y_max, settings.y_max_cap);
  return SolverGrid::uniform(z_max, settings.z_steps, y_max, settings.y_steps);
}

std::string_view to_string(Action action) {
  switch (action) {
    case Action::Cancel:
      return "cancel";
    case Action::Wait:
      return "wait";
    case Action::Trade:
      return "trade";
    case Action::ForcedAct:
      return "forced";
    case Action::Expire:
      return "expire";
  }
  return "unknown";
}

SolveContext::SolveContext(const BinomialLattice& lattice, const PayoffTables& tables,
                           const FrictionParams& fp, const SolverGrid& grid)
    : lattice_(lattice),
      tables_(tables),
      friction_(fp),
      grid_(grid),
      layout_(tables.tree, grid.nz(), grid.ny()) {
  const int n = lattice.steps();
  if (tables.tree.steps() != n) throw std::invalid_argument("payoff tables built for a different n");

  prices_.resize(static_cast<std::size_t>(n) + 1);
  for (int k = 0; k <= n; ++k) {
    auto& layer = prices_[static_cast<std::size_t>(k)];
    layer.resize(tables.tree.count(k));
    for (std::size_t node = 0; node < layer.size(); ++node) {
      layer[node] = lattice.price(k, tables.tree.ups(k, node));
    }
  }

  const auto& ys = grid.y();
  trade_order_.resize(ys.size());
  for (std::size_t j = 0; j < ys.size(); ++j) {
    auto& order = trade_order_[j];
    for (std::size_t t = 0; t < ys.size(); ++t) {
      if (t != j) order.push_back(static_cast<int>(t));
    }
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
      const double da = std::abs(ys[static_cast<std::size_t>(a)] - ys[j]);
      const double db = std::abs(ys[static_cast<std::size_t>(b)] - ys[j]);
      return da < db;
    });
  }
}

double interpolate_cash(std::span<const double> row, std::span<const double> z_grid, double z) {
  assert(z >= 0.0);
  const double top = z_grid.back();
  if (z > top) return 0.0;
  const auto nz = static_cast<std::ptrdiff_t>(z_grid.size());
  auto i = std::upper_bound(z_grid.begin(), z_grid.end(), z) - z_grid.begin() - 1;
  if (i >= nz - 1) i = nz - 2;
  const auto lo = static_cast<std::size_t>(i);
  const double w = (z - z_grid[lo]) / (z_grid[lo + 1] - z_grid[lo]);
  return (1.0 - w) * row[lo] + w * row[lo + 1];
}

std::vector<double> terminal_layer(const SolveContext& ctx) {
  const int n = ctx.lattice().steps();
  const auto& layout = ctx.layout();
  const auto& payoff = ctx.tables().buyer[static_cast<std::size_t>(n)];
  const auto& zs = ctx.grid().z();
  std::vector<double> layer(layout.layer_size(n));
  for (std::size_t node = 0; node < payoff.size(); ++node) {
    for (int j = 0; j < layout.ny(); ++j) {
      for (int i = 0; i < layout.nz(); ++i) {
        layer[layout.offset(node, i, j)] = std::max(payoff[node] - zs[static_cast<std::size_t>(i)], 0.0);
      }
    }
  }
  return layer;
}

std::optional<double> continuation_value(const SolveContext& ctx, int k, std::size_t node, double z,
                                         int y_index, std::span<const double> next_layer) {
  const auto& tree = ctx.layout().tree();
  const double y = ctx.grid().y()[static_cast<std::size_t>(y_index)];
  const double price = ctx.price(k, node);
  const std::size_t up = tree.up_child(k, node);
  const std::size_t down = tree.down_child(k, node);

  const double z_up = mark_to_market(price, ctx.price(k + 1, up), z, y, ctx.friction());
  const double z_down = mark_to_market(price, ctx.price(k + 1, down), z, y, ctx.friction());
  if (z_up < 0.0 || z_down < 0.0) return std::nullopt;

  const auto& layout = ctx.layout();
  const auto nz = static_cast<std::size_t>(layout.nz());
  const std::span<const double> zs = ctx.grid().z();
  const double p = ctx.lattice().up_prob();
  const double risk_up = interpolate_cash(next_layer.subspan(layout.row(up, y_index), nz), zs, z_up);
  const double risk_down =
      interpolate_cash(next_layer.subspan(layout.row(down, y_index), nz), zs, z_down);
  return p * risk_up + (1.0 - p) * risk_down;
}

StepResult step_value(const SolveContext& ctx, int k, std::size_t node, double z, int y_index,
                      std::span<const double> next_layer) {
  assert(z >= 0.0);
  const auto kk = static_cast<std::size_t>(k);
  const double buyer_stop = std::max(ctx.tables().buyer[kk][node] - z, 0.0);
  const double cancel = std::max(ctx.tables().seller[kk][node] - z, 0.0);

  double best = cancel;
  Decision decision{Action::Cancel, false, static_cast<std::int16_t>(y_index)};
  bool admissible = false;

  if (const auto wait = continuation_value(ctx, k, node, z, y_index, next_layer)) {
    admissible = true;
    if (*wait < best) {
      best = *wait;
      decision.action = Action::Wait;
    }
  }

  const auto& ys = ctx.grid().y();
  const double y = ys[static_cast<std::size_t>(y_index)];
  const double price = ctx.price(k, node);
  // Risk is nonnegative, so once a branch reaches 0 nothing can beat it.
  if (best > 0.0 || !admissible) {
    for (const int target : ctx.trade_order(y_index)) {
      const double beta = ys[static_cast<std::size_t>(target)] - y;
      const double after = post_trade_value(price, z, y, beta, ctx.friction());
      if (after < 0.0) continue;
      const auto value = continuation_value(ctx, k, node, after, target, next_layer);
      if (!value) continue;
      admissible = true;
      if (*value < best) {
        best = *value;
        decision.action = Action::Trade;
        decision.target = static_cast<std::int16_t>(target);
        if (best == 0.0) break;
      }
    }
  }

  if (!admissible) decision.action = Action::ForcedAct;
  decision.buyer_stop = buyer_stop >= best;
  return {std::max(buyer_stop, best), decision};
}

Solution solve(const BinomialLattice& lattice, const PayoffTables& tables, const FrictionParams& fp,
               const SolverGrid& grid, SolveOptions options) {
  const int n = lattice.steps();
  const double max_x = tables.max_seller();
  if (grid.z_max() < max_x) {
    throw std::invalid_argument("cash grid too coarse: z_max " + std::to_string(grid.z_max()) +
                                " < max X " + std::to_string(max_x));
  }
  const SolveContext ctx(lattice, tables, fp, grid);
  const auto& layout = ctx.layout();

  constexpr std::size_t kMaxLayerStates = std::size_t{1} << 30;
  if (layout.layer_size(n) > kMaxLayerStates) {
    throw SizeError("state space too large: " + std::to_string(layout.layer_size(n)) +
                    " states in the final layer");
  }

  std::vector<std::vector<double>> values(static_cast<std::size_t>(n) + 1);
  std::vector<std::vector<Decision>> decisions(static_cast<std::size_t>(n) + 1);
  values[static_cast<std::size_t>(n)] = terminal_layer(ctx);
  if (options.keep_all_layers || n == 0) {
    decisions[static_cast<std::size_t>(n)].assign(layout.layer_size(n),
                                                  Decision{Action::Expire, true, -1});
  }

  const auto& zs = grid.z();
  for (int k = n - 1; k >= 0; --k) {
    const auto kk = static_cast<std::size_t>(k);
    const std::span<const double> next = values[kk + 1];
    auto& layer = values[kk];
    auto& acts = decisions[kk];
    layer.resize(layout.layer_size(k));
    acts.resize(layout.layer_size(k));
    const auto nodes = static_cast<std::ptrdiff_t>(layout.tree().count(k));

#pragma omp parallel for schedule(dynamic)
    for (std::ptrdiff_t node = 0; node < nodes; ++node) {
      const auto nd = static_cast<std::size_t>(node);
      for (int j = 0; j < layout.ny(); ++j) {
        for (int i = 0; i < layout.nz(); ++i) {
          const StepResult r = step_value(ctx, k, nd, zs[static_cast<std::size_t>(i)], j, next);
          const std::size_t at = layout.offset(nd, i, j);
          layer[at] = r.value;
          acts[at] = r.decision;
        }
      }
    }

    if (!options.keep_all_layers) {
      values[kk + 1].clear();
      values[kk + 1].shrink_to_fit();
      decisions[kk + 1].clear();
      decisions[kk + 1].shrink_to_fit();
    }
  }

  return Solution{RiskSurface(layout, grid, std::move(values)), Policy(layout, std::move(decisions))};
}

double query_risk(const RiskSurface& surface, double z, double y) {
  if (!(z >= 0.0)) throw std::invalid_argument("query_risk: z must be >= 0");
  const int j = surface.grid().find_y(y);
  if (j < 0) throw std::invalid_argument("query_risk: y = " + std::to_string(y) + " is not a grid level");
  return interpolate_cash(surface.cash_row(0, 0, j), surface.grid().z(), z);
}

}  // namespace gamehedge
