#pragma once

#include <cstdint>

#include "gamehedge/friction.hpp"
#include "gamehedge/model.hpp"
#include "gamehedge/payoff.hpp"
#include "gamehedge/solver.hpp"

namespace gamehedge {

/// A lattice small enough (n <= 3) to enumerate every history of the game.
struct TinyInstance {
  BinomialLattice lattice;
  FrictionParams friction;
  PayoffPair payoff;
  SolverGrid grid;
};

struct OracleOptions {
  std::uint64_t max_leaves = 100'000'000;
  bool buyer_may_stop_early = true;
  bool seller_may_cancel = true;
  bool seller_may_trade = true;
};

struct OracleStats {
  std::uint64_t leaf_bound = 0;  ///< worst-case leaf count, known before enumeration
  std::uint64_t leaves = 0;      ///< maturity leaves actually evaluated
};

/// Exact min over seller plans and max over buyer stopping rules of the
/// expected shortfall, by explicit game-tree search over full histories.
///
/// The tree is non-recombining: each decision node is a history of price moves
/// and, after every step, the draw that places the off-grid liquidation value
/// on one of its two bracketing cash levels with linear weights. Seller plans
/// and buyer stopping rules are adapted to that history. Payoffs are evaluated
/// on the price prefix of the history. With the solver's grids this game has
/// the same value as the backward recursion; nothing is shared with it except
/// the friction cost g and the lattice prices.
///
/// Throws SizeError for n > 3 or when the leaf bound exceeds max_leaves.
double brute_force_risk(const TinyInstance& instance, double z0, double y0,
                        const OracleOptions& options = {}, OracleStats* stats = nullptr);

}  // namespace gamehedge
