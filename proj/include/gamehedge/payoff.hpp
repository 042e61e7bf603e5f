#pragma once

#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "gamehedge/model.hpp"

namespace gamehedge {

enum class PayoffKind { GamePut, GameCall, LookbackGamePut };

std::string_view to_string(PayoffKind kind);
/// Accepts the names produced by to_string (e.g. "game_put"); throws std::invalid_argument.
PayoffKind parse_payoff_kind(std::string_view name);

/// Declared growth bound ||F|| + ||G|| <= C (1 + ||x||^p).
struct GrowthBound {
  double C;
  double p;
};

/// Buyer payoff Y <= seller payoff X. The cancellation penalty applies
/// strictly before maturity; at maturity X = Y.
struct PayoffPair {
  PayoffKind kind = PayoffKind::GamePut;
  double strike = 100.0;
  double penalty = 0.0;

  bool path_dependent() const { return kind == PayoffKind::LookbackGamePut; }
  /// Lipschitz constant in the sup norm of the price path.
  double lipschitz() const { return 1.0; }
  GrowthBound growth() const;
  void validate() const;

  bool operator==(const PayoffPair&) const = default;
};

struct PayoffValue {
  double buyer;   ///< Y
  double seller;  ///< X
};

/// Payoffs after the price prefix `prices`; `at_maturity` drops the penalty.
PayoffValue evaluate(const PayoffPair& pair, std::span<const double> prices, bool at_maturity);

/// Same, with the prefix's time stamps; the last time decides maturity.
PayoffValue evaluate(const PayoffPair& pair, std::span<const double> prices,
                     std::span<const double> times, double maturity);

/// Node-indexed Y and X over a lattice. Markovian payoffs use the recombining
/// tree; path-dependent ones use a path tree (n <= 20).
struct PayoffTables {
  TreeIndex tree;
  std::vector<std::vector<double>> buyer;   ///< [k][node]
  std::vector<std::vector<double>> seller;  ///< [k][node]

  double max_seller() const;
};

PayoffTables evaluate_on_lattice(const PayoffPair& pair, const BinomialLattice& lattice);

/// Prices along the path-tree node `node` at step k: k + 1 values.
std::vector<double> node_path_prices(const BinomialLattice& lattice, int k, std::size_t node);

}  // namespace gamehedge
