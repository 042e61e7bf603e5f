#include "gamehedge/friction.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace gamehedge {

FrictionParams::FrictionParams(double delta, double mu) : delta_(delta), mu_(mu) {
  if (!(delta > 0.0) || !std::isfinite(delta))
    throw std::invalid_argument("friction.delta must be > 0");
  if (!(mu > 0.0 && mu < 1.0)) throw std::invalid_argument("friction.mu must be in (0, 1)");
}

double trade_cost(double beta, double S, const FrictionParams& fp) {
  if (beta == 0.0) return 0.0;
  return std::max(fp.delta(), fp.mu() * std::abs(beta) * S);
}

double post_trade_value(double S, double z, double y, double beta, const FrictionParams& fp) {
  if (beta == 0.0) return z - fp.delta();
  return z + trade_cost(y, S, fp) - trade_cost(y + beta, S, fp) - trade_cost(beta, S, fp);
}

double mark_to_market(double s_old, double s_new, double z, double y, const FrictionParams& fp) {
  return z + trade_cost(y, s_old, fp) + y * (s_new - s_old) - trade_cost(y, s_new, fp);
}

bool TradeSet::empty() const {
  return std::none_of(intervals_.begin(), intervals_.end(),
                      [](const Interval& iv) { return iv.lo != 0.0 || iv.hi != 0.0; });
}

bool TradeSet::contains(double beta) const {
  if (beta == 0.0) return false;
  return std::any_of(intervals_.begin(), intervals_.end(),
                     [beta](const Interval& iv) { return iv.lo <= beta && beta <= iv.hi; });
}

namespace {

struct Affine {
  double a;
  double b;
};

// h restricted to the open segment containing `probe`, where neither beta
// nor y + beta changes sign or crosses the fee kink.
Affine affine_piece(double S, double z, double y, double probe, const FrictionParams& fp) {
  const double slope = fp.mu() * S;
  Affine f{z + trade_cost(y, S, fp), 0.0};
  if (slope * std::abs(probe) > fp.delta()) {
    f.b -= slope * (probe > 0.0 ? 1.0 : -1.0);
  } else {
    f.a -= fp.delta();
  }
  const double after = y + probe;
  if (slope * std::abs(after) > fp.delta()) {
    const double sign = after > 0.0 ? 1.0 : -1.0;
    f.a -= slope * sign * y;
    f.b -= slope * sign;
  } else {
    f.a -= fp.delta();
  }
  return f;
}

}  // namespace

TradeSet trade_set(double S, double z, double y, const FrictionParams& fp) {
  if (!(S > 0.0)) throw std::invalid_argument("trade_set: price must be > 0");
  if (!(z >= 0.0)) throw std::invalid_argument("trade_set: liquidation value must be >= 0");

  const double kink = fp.delta() / (fp.mu() * S);
  std::vector<double> breaks = {0.0, -y, kink, -kink, -y + kink, -y - kink};
  std::sort(breaks.begin(), breaks.end());
  breaks.erase(std::unique(breaks.begin(), breaks.end()), breaks.end());

  constexpr double inf = std::numeric_limits<double>::infinity();
  std::vector<Interval> pieces;
  for (std::size_t s = 0; s <= breaks.size(); ++s) {
    const double lo = s == 0 ? -inf : breaks[s - 1];
    const double hi = s == breaks.size() ? inf : breaks[s];
    double probe;
    if (s == 0) {
      probe = hi - std::max(1.0, std::abs(hi));
    } else if (s == breaks.size()) {
      probe = lo + std::max(1.0, std::abs(lo));
    } else {
      probe = 0.5 * (lo + hi);
    }
    const Affine f = affine_piece(S, z, y, probe, fp);
    double from = lo;
    double to = hi;
    if (f.b == 0.0) {
      // Flat pieces often sit exactly at h = 0 (fees cancel); allow round-off.
      if (f.a < -1e-12 * (1.0 + z + trade_cost(y, S, fp))) continue;
    } else {
      const double root = -f.a / f.b;
      if (f.b > 0.0) {
        from = std::max(lo, root);
      } else {
        to = std::min(hi, root);
      }
      if (from > to) continue;
    }
    // The piece slopes to -infinity on both rays, so both ends are finite here.
    pieces.push_back({from, to});
  }
  // Full liquidation keeps the liquidation value, so -y is always feasible.
  if (y != 0.0) pieces.push_back({-y, -y});

  std::sort(pieces.begin(), pieces.end(),
            [](const Interval& l, const Interval& r) { return l.lo < r.lo; });
  std::vector<Interval> merged;
  for (const Interval& iv : pieces) {
    if (!merged.empty() && iv.lo <= merged.back().hi) {
      merged.back().hi = std::max(merged.back().hi, iv.hi);
    } else {
      merged.push_back(iv);
    }
  }
  return TradeSet(std::move(merged));
}

}  // namespace gamehedge
