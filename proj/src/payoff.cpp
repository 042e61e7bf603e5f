#include "gamehedge/payoff.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace gamehedge {

std::string_view to_string(PayoffKind kind) {
  switch (kind) {
    case PayoffKind::GamePut:
      return "game_put";
    case PayoffKind::GameCall:
      return "game_call";
    case PayoffKind::LookbackGamePut:
      return "lookback_game_put";
  }
  return "unknown";
}

PayoffKind parse_payoff_kind(std::string_view name) {
  if (name == "game_put") return PayoffKind::GamePut;
  if (name == "game_call") return PayoffKind::GameCall;
  if (name == "lookback_game_put") return PayoffKind::LookbackGamePut;
  throw std::invalid_argument("unknown payoff kind '" + std::string(name) + "'");
}

GrowthBound PayoffPair::growth() const {
  switch (kind) {
    case PayoffKind::GamePut:
    case PayoffKind::LookbackGamePut:
      return {2.0 * (strike + penalty), 1.0};
    case PayoffKind::GameCall:
      return {std::max(2.0, penalty), 1.0};
  }
  return {0.0, 1.0};
}

void PayoffPair::validate() const {
  if (!(strike > 0.0) || !std::isfinite(strike)) throw std::invalid_argument("payoff.strike must be > 0");
  if (!(penalty >= 0.0) || !std::isfinite(penalty))
    throw std::invalid_argument("payoff.penalty must be >= 0");
}

PayoffValue evaluate(const PayoffPair& pair, std::span<const double> prices, bool at_maturity) {
  if (prices.empty()) throw std::invalid_argument("evaluate: empty price prefix");
  double y = 0.0;
  switch (pair.kind) {
    case PayoffKind::GamePut:
      y = std::max(pair.strike - prices.back(), 0.0);
      break;
    case PayoffKind::GameCall:
      y = std::max(prices.back() - pair.strike, 0.0);
      break;
    case PayoffKind::LookbackGamePut:
      y = std::max(pair.strike - *std::min_element(prices.begin(), prices.end()), 0.0);
      break;
  }
  return {y, at_maturity ? y : y + pair.penalty};
}

PayoffValue evaluate(const PayoffPair& pair, std::span<const double> prices,
                     std::span<const double> times, double maturity) {
  if (times.size() != prices.size()) throw std::invalid_argument("evaluate: times/prices size mismatch");
  return evaluate(pair, prices, !times.empty() && times.back() >= maturity);
}

double PayoffTables::max_seller() const {
  double m = 0.0;
  for (const auto& layer : seller) {
    for (double x : layer) m = std::max(m, x);
  }
  return m;
}

std::vector<double> node_path_prices(const BinomialLattice& lattice, int k, std::size_t node) {
  std::vector<double> prices(static_cast<std::size_t>(k) + 1);
  int ups = 0;
  prices[0] = lattice.price(0, 0);
  for (int i = 0; i < k; ++i) {
    if ((node >> i) & 1u) ++ups;
    prices[static_cast<std::size_t>(i) + 1] = lattice.price(i + 1, ups);
  }
  return prices;
}

PayoffTables evaluate_on_lattice(const PayoffPair& pair, const BinomialLattice& lattice) {
  pair.validate();
  const int n = lattice.steps();
  const auto kind = pair.path_dependent() ? TreeIndex::Kind::PathTree : TreeIndex::Kind::Recombining;
  PayoffTables tables{TreeIndex(kind, n), {}, {}};
  tables.buyer.resize(static_cast<std::size_t>(n) + 1);
  tables.seller.resize(static_cast<std::size_t>(n) + 1);

  for (int k = 0; k <= n; ++k) {
    const std::size_t count = tables.tree.count(k);
    auto& ys = tables.buyer[static_cast<std::size_t>(k)];
    auto& xs = tables.seller[static_cast<std::size_t>(k)];
    ys.resize(count);
    xs.resize(count);
    for (std::size_t node = 0; node < count; ++node) {
      PayoffValue v;
      if (kind == TreeIndex::Kind::Recombining) {
        const double price = lattice.price(k, static_cast<int>(node));
        v = evaluate(pair, std::span<const double>(&price, 1), k == n);
      } else {
        const auto prefix = node_path_prices(lattice, k, node);
        v = evaluate(pair, prefix, k == n);
      }
      ys[node] = v.buyer;
      xs[node] = v.seller;
    }
  }
  return tables;
}

}  // namespace gamehedge
