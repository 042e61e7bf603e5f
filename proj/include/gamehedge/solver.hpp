#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "gamehedge/friction.hpp"
#include "gamehedge/model.hpp"
#include "gamehedge/payoff.hpp"

namespace gamehedge {

/// Discretization knobs for the (cash, shares) state space.
struct GridSettings {
  int z_steps = 201;
  int y_steps = 41;
  double y_max_cap = 2.0;
  double z_max_factor = 1.05;
  /// Absolute cash ceiling; when > 0 it replaces z_max_factor * max X.
  double z_max = 0.0;

  bool operator==(const GridSettings&) const = default;
};

/// Cash levels z (liquidation value) and share levels y. Trades move between
/// share levels, so y is never interpolated.
class SolverGrid {
 public:
  /// Requires z strictly increasing from 0 and y strictly increasing with 0 present.
  SolverGrid(std::vector<double> z, std::vector<double> y);

  /// z_i = z_max i / (z_points - 1); y uniform on [-y_max, y_max], y_points odd.
  static SolverGrid uniform(double z_max, int z_points, double y_max, int y_points);

  const std::vector<double>& z() const { return z_; }
  const std::vector<double>& y() const { return y_; }
  int nz() const { return static_cast<int>(z_.size()); }
  int ny() const { return static_cast<int>(y_.size()); }
  double z_max() const { return z_.back(); }
  int zero_y() const { return zero_y_; }
  /// Index of an exact share level, or -1.
  int find_y(double y) const;
  /// Largest grid index with z_i <= z (z >= 0).
  int floor_z(double z) const;

 private:
  std::vector<double> z_;
  std::vector<double> y_;
  int zero_y_ = -1;
};

/// Share exposure bound ceil((z0 + (1 + mu)|y0| s + 1) / (mu s_min)) over the lattice.
double share_bound(const BinomialLattice& lattice, const FrictionParams& fp, double z0, double y0);

SolverGrid make_solver_grid(const BinomialLattice& lattice, const PayoffTables& tables,
                            const FrictionParams& fp, const GridSettings& settings, double z0,
                            double y0);

enum class Action : std::uint8_t {
  Cancel,     ///< seller cancels now
  Wait,       ///< hold the position one step
  Trade,      ///< move to share level `target`, then hold
  ForcedAct,  ///< every continuation is inadmissible; cancel
  Expire,     ///< maturity layer, the buyer collects Y
};

std::string_view to_string(Action action);

struct Decision {
  Action action = Action::Expire;
  bool buyer_stop = false;  ///< outer max attained by the buyer stopping
  std::int16_t target = -1;  ///< share index after the step (Trade only)
};

struct StepResult {
  double value;
  Decision decision;
};

/// Layer-local offsets; cash is the fastest index so interpolation reads are adjacent.
class StateLayout {
 public:
  StateLayout(TreeIndex tree, int nz, int ny) : tree_(tree), nz_(nz), ny_(ny) {}

  const TreeIndex& tree() const { return tree_; }
  int nz() const { return nz_; }
  int ny() const { return ny_; }
  std::size_t layer_size(int k) const {
    return tree_.count(k) * static_cast<std::size_t>(nz_) * static_cast<std::size_t>(ny_);
  }
  std::size_t offset(std::size_t node, int zi, int yj) const {
    return (node * static_cast<std::size_t>(ny_) + static_cast<std::size_t>(yj)) *
               static_cast<std::size_t>(nz_) +
           static_cast<std::size_t>(zi);
  }
  /// The nz cash values at fixed (node, yj).
  std::size_t row(std::size_t node, int yj) const { return offset(node, 0, yj); }

 private:
  TreeIndex tree_;
  int nz_;
  int ny_;
};

/// Immutable inputs of one backward sweep.
class SolveContext {
 public:
  SolveContext(const BinomialLattice& lattice, const PayoffTables& tables, const FrictionParams& fp,
               const SolverGrid& grid);

  const BinomialLattice& lattice() const { return lattice_; }
  const PayoffTables& tables() const { return tables_; }
  const FrictionParams& friction() const { return friction_; }
  const SolverGrid& grid() const { return grid_; }
  const StateLayout& layout() const { return layout_; }
  double price(int k, std::size_t node) const { return prices_[static_cast<std::size_t>(k)][node]; }
  /// Share targets reachable from level yj, ordered by |beta| then by level.
  std::span<const int> trade_order(int yj) const { return trade_order_[static_cast<std::size_t>(yj)]; }

 private:
  const BinomialLattice& lattice_;
  const PayoffTables& tables_;
  const FrictionParams& friction_;
  const SolverGrid& grid_;
  StateLayout layout_;
  std::vector<std::vector<double>> prices_;
  std::vector<std::vector<int>> trade_order_;
};

/// Linear interpolation of one cash row at z >= 0; zero above the grid.
double interpolate_cash(std::span<const double> row, std::span<const double> z_grid, double z);

/// Layer k = n: (Y - z)^+ for every share level.
std::vector<double> terminal_layer(const SolveContext& ctx);

/// Expected next-layer risk after holding y_index shares for one step, or
/// nullopt when either successor has negative liquidation value.
std::optional<double> continuation_value(const SolveContext& ctx, int k, std::size_t node, double z,
                                         int y_index, std::span<const double> next_layer);

/// One Dynkin step: max((Y-z)^+, min((X-z)^+, wait, trades)).
/// Ties favor Cancel, then Wait, then the smallest trade.
StepResult step_value(const SolveContext& ctx, int k, std::size_t node, double z, int y_index,
                      std::span<const double> next_layer);

class RiskSurface {
 public:
  RiskSurface(StateLayout layout, SolverGrid grid, std::vector<std::vector<double>> layers)
      : layout_(std::move(layout)), grid_(std::move(grid)), layers_(std::move(layers)) {}

  int steps() const { return static_cast<int>(layers_.size()) - 1; }
  const StateLayout& layout() const { return layout_; }
  const SolverGrid& grid() const { return grid_; }
  bool has_layer(int k) const { return !layers_.at(static_cast<std::size_t>(k)).empty(); }
  std::span<const double> layer(int k) const { return layers_.at(static_cast<std::size_t>(k)); }
  double value(int k, std::size_t node, int zi, int yj) const {
    return layers_[static_cast<std::size_t>(k)][layout_.offset(node, zi, yj)];
  }
  std::span<const double> cash_row(int k, std::size_t node, int yj) const {
    return layer(k).subspan(layout_.row(node, yj), static_cast<std::size_t>(layout_.nz()));
  }

 private:
  StateLayout layout_;
  SolverGrid grid_;
  std::vector<std::vector<double>> layers_;
};

class Policy {
 public:
  Policy(StateLayout layout, std::vector<std::vector<Decision>> layers)
      : layout_(std::move(layout)), layers_(std::move(layers)) {}

  const StateLayout& layout() const { return layout_; }
  bool has_layer(int k) const { return !layers_.at(static_cast<std::size_t>(k)).empty(); }
  const Decision& at(int k, std::size_t node, int zi, int yj) const {
    return layers_[static_cast<std::size_t>(k)][layout_.offset(node, zi, yj)];
  }

 private:
  StateLayout layout_;
  std::vector<std::vector<Decision>> layers_;
};

struct Solution {
  RiskSurface surface;
  Policy policy;
};

struct SolveOptions {
  /// When false only layer 0 of the surface and policy is retained.
  bool keep_all_layers = true;
};

/// Backward sweep k = n ... 0. Throws std::invalid_argument when the cash
/// grid does not reach max X or the inputs disagree on n, and SizeError when
/// the state space is unreasonably large.
Solution solve(const BinomialLattice& lattice, const PayoffTables& tables, const FrictionParams& fp,
               const SolverGrid& grid, SolveOptions options = {});

/// R_n(z, y) at the root. z above the grid returns 0 (risk vanishes once cash
/// covers every payoff); negative z or off-grid y throw std::invalid_argument.
double query_risk(const RiskSurface& surface, double z, double y);

}  // namespace gamehedge
