#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "gamehedge/friction.hpp"

using namespace gamehedge;

namespace {
const FrictionParams kFp(0.5, 0.01);
}

TEST_CASE("trade cost") {
  CHECK(trade_cost(2, 10, kFp) == 0.5);
  CHECK(trade_cost(10, 100, kFp) == 10.0);
  CHECK(trade_cost(-10, 100, kFp) == 10.0);
  CHECK(trade_cost(0, 100, kFp) == 0.0);
  CHECK(trade_cost(0, 1e9, kFp) == 0.0);
  CHECK_THROWS_AS(FrictionParams(0, 0.01), std::invalid_argument);
  CHECK_THROWS_AS(FrictionParams(0.5, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(FrictionParams(0.5, 0.0), std::invalid_argument);
}

TEST_CASE("post-trade value") {
  CHECK(post_trade_value(100, 10, 0, 1, kFp) == 8.0);
  CHECK(post_trade_value(100, 10, 3, 0, kFp) == 9.5);
  for (double y : {-3.0, -0.2, 0.7, 12.0}) {
    CHECK(post_trade_value(100, 4, y, -y, kFp) == 4.0);
    CHECK(post_trade_value(37, 0, y, -y, kFp) == 0.0);
  }
}

TEST_CASE("mark to market") {
  CHECK(mark_to_market(100, 110, 10, 1, kFp) == doctest::Approx(19.9).epsilon(1e-14));
  CHECK(mark_to_market(100, 57, 10, 0, kFp) == 10.0);
  CHECK(mark_to_market(100, 100, 10, 3.3, kFp) == 10.0);
}

TEST_CASE("trade set examples") {
  // From no shares a round trip pays the fee twice: feasible only once z >= 2 delta.
  CHECK(trade_set(100, 0.3, 0, kFp).empty());
  CHECK(trade_set(100, 0.99, 0, kFp).empty());
  const TradeSet both_ways = trade_set(100, 1.0, 0, kFp);
  CHECK(both_ways.contains(-0.5));
  CHECK(both_ways.contains(0.2));
  CHECK(both_ways.contains(0.5));
  CHECK_FALSE(both_ways.contains(0.0));
  CHECK_FALSE(both_ways.contains(0.51));

  // A small long position with no cash can only be closed.
  const TradeSet single = trade_set(100, 0, 0.3, kFp);
  REQUIRE(single.intervals().size() == 1);
  CHECK(single.intervals()[0].lo == -0.3);
  CHECK(single.intervals()[0].hi == -0.3);
  CHECK(single.contains(-0.3));
  CHECK_FALSE(single.contains(-0.3 + 1e-6));
  CHECK_FALSE(single.contains(0.0));

  // One share: closing, or halving the position so that both legs pay the bare fee.
  const TradeSet two = trade_set(100, 0, 1, kFp);
  REQUIRE(two.intervals().size() == 2);
  CHECK(two.contains(-1.0));
  CHECK(two.contains(-0.5));
  CHECK_FALSE(two.contains(-0.75));

  for (double y : {-5.0, -0.3, 0.01, 2.0, 40.0}) {
    for (double z : {0.0, 0.2, 3.0}) CHECK(trade_set(90, z, y, kFp).contains(-y));
  }
}

// Dense scan of h: every scanned size with h >= 0 must be in the set, every
// size with h clearly negative must not be.
TEST_CASE("trade set agrees with a dense scan of h") {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> price(20, 200);
  std::uniform_real_distribution<double> cash(0, 6);
  std::uniform_real_distribution<double> shares(-3, 3);
  std::uniform_real_distribution<double> delta(0.1, 1.0);
  std::uniform_real_distribution<double> mu(0.001, 0.05);
  for (int trial = 0; trial < 300; ++trial) {
    const FrictionParams fp(delta(rng), mu(rng));
    const double S = price(rng);
    const double z = trial % 7 == 0 ? 0.0 : cash(rng);
    const double y = trial % 5 == 0 ? 0.0 : shares(rng);
    const TradeSet set = trade_set(S, z, y, fp);
    const double reach = std::abs(y) + (z + 1) / (fp.mu() * S) + 1;
    const int steps = 20'000;
    for (int i = 0; i <= steps; ++i) {
      const double beta = -reach + 2 * reach * i / steps;
      if (beta == 0.0) continue;
      const double h = post_trade_value(S, z, y, beta, fp);
      if (h >= 0.0) {
        CHECK_MESSAGE(set.contains(beta), "S=", S, " z=", z, " y=", y, " beta=", beta);
      } else if (h < -1e-9) {
        CHECK_FALSE_MESSAGE(set.contains(beta), "S=", S, " z=", z, " y=", y, " beta=", beta);
      }
    }
    for (const Interval& iv : set.intervals()) {
      CHECK(iv.lo <= iv.hi);
      if (iv.lo != 0.0) CHECK(post_trade_value(S, z, y, iv.lo, fp) >= -1e-9);
      if (iv.hi != 0.0) CHECK(post_trade_value(S, z, y, iv.hi, fp) >= -1e-9);
    }
    for (std::size_t i = 1; i < set.intervals().size(); ++i) {
      CHECK(set.intervals()[i - 1].hi < set.intervals()[i].lo);
    }
  }
}

TEST_CASE("cost is subadditive and one trade dominates two") {
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> u(-4, 4);
  std::uniform_real_distribution<double> price(20, 200);
  for (int trial = 0; trial < 10'000; ++trial) {
    const double S = price(rng);
    const double a = u(rng);
    const double b = u(rng);
    const double y = u(rng);
    CHECK(trade_cost(a + b, S, kFp) <= trade_cost(a, S, kFp) + trade_cost(b, S, kFp) + 1e-12);
    const double z = 10.0;
    const double two = post_trade_value(S, post_trade_value(S, z, y, a, kFp), y + a, b, kFp);
    const double one = a + b == 0.0 ? z : post_trade_value(S, z, y, a + b, kFp);
    CHECK(two <= one + 1e-12);
  }
}
