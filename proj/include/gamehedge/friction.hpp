#pragma once

#include <vector>

namespace gamehedge {

/// Trade cost max(delta, mu |beta| S) for any nonzero trade.
class FrictionParams {
 public:
  /// Throws std::invalid_argument unless delta > 0 and 0 < mu < 1.
  FrictionParams(double delta, double mu);

  double delta() const { return delta_; }
  double mu() const { return mu_; }

 private:
  double delta_;
  double mu_;
};

double trade_cost(double beta, double S, const FrictionParams& fp);

/// Liquidation value after trading beta shares from (z, y) at price S:
/// z + g(y) - g(y + beta) - g(beta). For beta = 0 this is z - delta.
/// May be negative; h <= z always.
double post_trade_value(double S, double z, double y, double beta, const FrictionParams& fp);

/// Liquidation value after the price moves from s_old to s_new with no trade.
double mark_to_market(double s_old, double s_new, double z, double y, const FrictionParams& fp);

struct Interval {
  double lo;
  double hi;
};

/// Feasible trade sizes {beta != 0 : h(S, z, y, beta) >= 0} as a union of
/// disjoint closed intervals. The zero trade is never a member, even when an
/// interval straddles it; use contains() for membership.
class TradeSet {
 public:
  TradeSet() = default;
  explicit TradeSet(std::vector<Interval> intervals) : intervals_(std::move(intervals)) {}

  const std::vector<Interval>& intervals() const { return intervals_; }
  bool empty() const;
  bool contains(double beta) const;

 private:
  std::vector<Interval> intervals_;
};

TradeSet trade_set(double S, double z, double y, const FrictionParams& fp);

}  // namespace gamehedge
