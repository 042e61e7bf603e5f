#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "gamehedge/errors.hpp"
#include "gamehedge/oracle.hpp"

using namespace gamehedge;

namespace {

const MarketParams kMarket(100, 0.2, 0.02, 1);
const FrictionParams kFp(0.5, 0.01);
const PayoffPair kPut{PayoffKind::GamePut, 100, 2};

double worst_gap(const TinyInstance& inst) {
  const PayoffTables tables = evaluate_on_lattice(inst.payoff, inst.lattice);
  const Solution sol = solve(inst.lattice, tables, inst.friction, inst.grid);
  double worst = 0.0;
  for (int yj = 0; yj < inst.grid.ny(); ++yj) {
    for (int zi = 0; zi < inst.grid.nz(); ++zi) {
      const double exact = brute_force_risk(inst, inst.grid.z()[zi], inst.grid.y()[yj]);
      worst = std::max(worst, std::abs(exact - sol.surface.value(0, 0, zi, yj)));
    }
  }
  return worst;
}

}  // namespace

TEST_CASE("one step by hand") {
  const BinomialLattice lattice(kMarket, 1);
  const TinyInstance inst{lattice, kFp, kPut, SolverGrid::uniform(30, 101, 2, 5)};
  const double z = 0.3;
  const double p = lattice.up_prob();
  const double y1_up = std::max(100 - lattice.price(1, 1) - z, 0.0);
  const double y1_down = std::max(100 - lattice.price(1, 0) - z, 0.0);
  const double expected = std::max(std::max(0.0 - z, 0.0), std::min(2.0 - z, p * y1_up + (1 - p) * y1_down));
  CHECK(brute_force_risk(inst, z, 0) == doctest::Approx(expected).epsilon(1e-15));
  CHECK(brute_force_risk(inst, 30, 0) == 0.0);
}

TEST_CASE("oracle equals the solver on shared grids") {
  for (int n : {1, 2, 3}) {
    CAPTURE(n);
    const BinomialLattice lattice(kMarket, n);
    CHECK(worst_gap({lattice, kFp, kPut, SolverGrid::uniform(30, 21, 2, 5)}) <= 1e-12);
    CHECK(worst_gap({lattice, kFp, PayoffPair{PayoffKind::GamePut, 100, 10}, SolverGrid::uniform(40, 21, 2, 5)}) <=
          1e-12);
    CHECK(worst_gap({lattice, kFp, PayoffPair{PayoffKind::GameCall, 95, 4}, SolverGrid::uniform(50, 21, 1, 5)}) <=
          1e-12);
    CHECK(worst_gap({lattice, FrictionParams(0.2, 0.02), PayoffPair{PayoffKind::LookbackGamePut, 105, 3},
                     SolverGrid::uniform(40, 16, 2, 9)}) <= 1e-12);
  }
  // Uneven cash levels and a drift that favours down moves.
  const BinomialLattice lattice(MarketParams(90, 0.3, -0.05, 0.5), 3);
  const TinyInstance inst{lattice, kFp, kPut, SolverGrid({0, 0.4, 1, 2.5, 4, 7, 11, 16, 22, 30, 40}, {-1, -0.5, 0, 1})};
  CHECK(worst_gap(inst) <= 1e-12);
}

TEST_CASE("restricting a player moves the value the right way") {
  const BinomialLattice lattice(kMarket, 3);
  const PayoffPair pair{PayoffKind::GamePut, 100, 6};
  const TinyInstance inst{lattice, kFp, pair, SolverGrid::uniform(30, 21, 2, 5)};
  OracleOptions no_early_buyer;
  no_early_buyer.buyer_may_stop_early = false;
  OracleOptions no_cancel;
  no_cancel.seller_may_cancel = false;
  OracleOptions no_trade;
  no_trade.seller_may_trade = false;
  for (double z : {0.0, 1.5, 3.0, 4.5, 9.0}) {
    for (double y : {-1.0, 0.0, 1.0}) {
      const double full = brute_force_risk(inst, z, y);
      CHECK(brute_force_risk(inst, z, y, no_early_buyer) <= full);
      CHECK(brute_force_risk(inst, z, y, no_cancel) >= full);
      CHECK(brute_force_risk(inst, z, y, no_trade) >= full);
    }
  }
}

TEST_CASE("size limits") {
  const BinomialLattice big(kMarket, 4);
  CHECK_THROWS_AS(brute_force_risk({big, kFp, kPut, SolverGrid::uniform(30, 21, 2, 5)}, 0, 0), SizeError);
  const BinomialLattice lattice(kMarket, 3);
  OracleOptions tight;
  tight.max_leaves = 100;
  OracleStats stats;
  CHECK_THROWS_AS(brute_force_risk({lattice, kFp, kPut, SolverGrid::uniform(30, 21, 2, 5)}, 0, 0, tight, &stats),
                  SizeError);
  CHECK(stats.leaf_bound == 8000);
  CHECK_THROWS_AS(brute_force_risk({lattice, kFp, kPut, SolverGrid::uniform(30, 21, 2, 5)}, 0.7, 0),
                  std::invalid_argument);
  CHECK_THROWS_AS(brute_force_risk({lattice, kFp, kPut, SolverGrid::uniform(30, 21, 2, 5)}, 0, 0.5),
                  std::invalid_argument);
}
