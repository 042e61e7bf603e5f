#include "gamehedge/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

#include "gamehedge/errors.hpp"

namespace gamehedge {

namespace {

class GameTree {
 public:
  GameTree(const TinyInstance& instance, const OracleOptions& options)
      : inst_(instance), opts_(options), n_(instance.lattice.steps()) {}

  std::uint64_t leaves() const { return leaves_; }

  // `prices` is the price history S_0..S_k; `value` the liquidation value
  // before any trade at step k; `shares` the held position.
  double decide(std::vector<double>& prices, int ups, double value, double shares) {
    const int k = static_cast<int>(prices.size()) - 1;
    const PayoffValue pay = evaluate(inst_.payoff, prices, k == n_);
    const double buyer_stop = std::max(pay.buyer - value, 0.0);
    if (k == n_) {
      if (++leaves_ > opts_.max_leaves) throw SizeError("oracle leaf cap exceeded");
      return buyer_stop;
    }

    const double price = prices.back();
    bool any_branch = false;
    double best = 0.0;
    auto offer = [&](double v) {
      if (!any_branch || v < best) best = v;
      any_branch = true;
    };

    // Hold (the zero trade) and every trade to another share level.
    for (const double target : inst_.grid.y()) {
      const double beta = target - shares;
      double after = value;
      if (beta != 0.0) {
        if (!opts_.seller_may_trade) continue;
        const FrictionParams& fp = inst_.friction;
        after = value + trade_cost(shares, price, fp) - trade_cost(shares + beta, price, fp) -
                trade_cost(beta, price, fp);
        if (after < 0.0) continue;
      }
      double expected = 0.0;
      bool admissible = true;
      for (const int move : {1, 0}) {
        const double next_price = inst_.lattice.price(k + 1, ups + move);
        const FrictionParams& fp = inst_.friction;
        const double next_value = after + trade_cost(target, price, fp) +
                                  target * (next_price - price) -
                                  trade_cost(target, next_price, fp);
        if (next_value < 0.0) {
          admissible = false;
          break;
        }
        prices.push_back(next_price);
        const double risk = settle(prices, ups + move, next_value, target);
        prices.pop_back();
        const double weight = move == 1 ? inst_.lattice.up_prob() : 1.0 - inst_.lattice.up_prob();
        if (move == 1) {
          expected = weight * risk;
        } else {
          expected = expected + weight * risk;
        }
      }
      if (admissible) offer(expected);
    }

    const double cancel = std::max(pay.seller - value, 0.0);
    // Cancellation is always available when no continuation is admissible.
    if (opts_.seller_may_cancel || !any_branch) offer(cancel);

    if (!opts_.buyer_may_stop_early) return best;
    return std::max(buyer_stop, best);
  }

 private:
  // Chance node placing an off-grid liquidation value on the cash grid.
  double settle(std::vector<double>& prices, int ups, double value, double shares) {
    const auto& zs = inst_.grid.z();
    if (value >= zs.back()) return decide(prices, ups, value, shares);
    std::size_t lo = 0;
    while (lo + 1 < zs.size() && zs[lo + 1] <= value) ++lo;
    const double w = (value - zs[lo]) / (zs[lo + 1] - zs[lo]);
    const double below = decide(prices, ups, zs[lo], shares);
    const double above = w > 0.0 ? decide(prices, ups, zs[lo + 1], shares) : 0.0;
    return (1.0 - w) * below + w * above;
  }

  const TinyInstance& inst_;
  const OracleOptions& opts_;
  int n_;
  std::uint64_t leaves_ = 0;
};

std::uint64_t leaf_bound(int n, std::size_t share_levels) {
  // Per step: every share level as a branch, two price moves, two cash draws.
  const std::uint64_t fan = static_cast<std::uint64_t>(share_levels) * 4;
  std::uint64_t total = 1;
  for (int k = 0; k < n; ++k) {
    if (total > UINT64_MAX / fan) return UINT64_MAX;
    total *= fan;
  }
  return total;
}

}  // namespace

double brute_force_risk(const TinyInstance& instance, double z0, double y0,
                        const OracleOptions& options, OracleStats* stats) {
  const int n = instance.lattice.steps();
  if (n > 3) throw SizeError("oracle supports n <= 3, got n = " + std::to_string(n));
  if (!(z0 >= 0.0)) throw std::invalid_argument("oracle: z0 must be >= 0");
  if (instance.grid.find_y(y0) < 0) throw std::invalid_argument("oracle: y0 must be a grid level");
  if (std::find(instance.grid.z().begin(), instance.grid.z().end(), z0) == instance.grid.z().end() &&
      z0 <= instance.grid.z_max()) {
    throw std::invalid_argument("oracle: z0 must be a grid level");
  }
  if (instance.grid.z_max() < evaluate_on_lattice(instance.payoff, instance.lattice).max_seller()) {
    throw std::invalid_argument("oracle: cash grid does not reach max X");
  }

  const std::uint64_t bound = leaf_bound(n, instance.grid.y().size());
  if (stats) stats->leaf_bound = bound;
  if (bound > options.max_leaves) {
    throw SizeError("oracle strategy space too large: up to " + std::to_string(bound) + " leaves");
  }

  GameTree tree(instance, options);
  std::vector<double> prices{instance.lattice.price(0, 0)};
  const double value = tree.decide(prices, 0, z0, y0);
  if (stats) stats->leaves = tree.leaves();
  return value;
}

}  // namespace gamehedge
