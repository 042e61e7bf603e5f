#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <limits>

#include "gamehedge/errors.hpp"
#include "gamehedge/lift.hpp"

using namespace gamehedge;

namespace {

const MarketParams kMarket(100, 0.2, 0.02, 1);
const FrictionParams kFp(0.5, 0.01);

struct Setup {
  BinomialLattice lattice;
  PayoffPair pair;
  PayoffTables tables;
  SolverGrid grid;
  Solution solution;

  Setup(int n, PayoffPair p, double z0)
      : lattice(kMarket, n),
        pair(p),
        tables(evaluate_on_lattice(p, lattice)),
        grid(make_solver_grid(lattice, tables, kFp, GridSettings{}, z0, 0)),
        solution(solve(lattice, tables, kFp, grid)) {}
};

std::vector<BuyerStrategy> family() {
  std::vector<BuyerStrategy> b;
  for (double c : {0.0, 1.0, 4.0, std::numeric_limits<double>::infinity()}) b.push_back(buyer_threshold_strategy(c));
  return b;
}

}  // namespace

TEST_CASE("buyer strategies") {
  CHECK(buyer_threshold_strategy(std::numeric_limits<double>::infinity()).name() == "threshold=inf");
  CHECK(buyer_threshold_strategy(0.5).name() == "threshold=0.5");
  CHECK_THROWS_AS(buyer_threshold_strategy(-1), std::invalid_argument);
}

TEST_CASE("enough cash: no shortfall on any path") {
  const Setup s(8, PayoffPair{PayoffKind::GamePut, 100, 2}, 30);
  SimOptions opts;
  opts.num_paths = 500;
  opts.fine_steps = 512;
  opts.trace = true;
  const SimReport r = lift_and_simulate(s.solution, s.lattice, kFp, s.pair, 30, 0, family(), opts);
  CHECK(r.paths == 500);
  CHECK(r.admissibility_violations == 0);
  for (const auto& st : r.strategies) CHECK(st.mean_shortfall == 0.0);
  CHECK(r.summaries.size() == 500);
  CHECK(r.trace.size() == 500 * 9);
}

TEST_CASE("simulation is deterministic and seed dependent") {
  const Setup s(8, PayoffPair{PayoffKind::GamePut, 100, 10}, 5);
  SimOptions opts;
  opts.num_paths = 300;
  opts.fine_steps = 512;
  const SimReport a = lift_and_simulate(s.solution, s.lattice, kFp, s.pair, 5, 0, family(), opts);
  const SimReport b = lift_and_simulate(s.solution, s.lattice, kFp, s.pair, 5, 0, family(), opts);
  REQUIRE(a.strategies.size() == 4);
  for (std::size_t i = 0; i < 4; ++i) {
    CHECK(a.strategies[i].mean_shortfall == b.strategies[i].mean_shortfall);
    CHECK(a.strategies[i].stderr_shortfall == b.strategies[i].stderr_shortfall);
  }
  CHECK(a.value_match_error == b.value_match_error);
  CHECK(a.growth_stat == b.growth_stat);
  opts.seed = 2;
  const SimReport c = lift_and_simulate(s.solution, s.lattice, kFp, s.pair, 5, 0, family(), opts);
  CHECK(c.strategies[3].mean_shortfall != a.strategies[3].mean_shortfall);
}

TEST_CASE("threshold family stays below the solver risk") {
  const Setup s(8, PayoffPair{PayoffKind::GamePut, 100, 10}, 5);
  SimOptions opts;
  opts.num_paths = 4000;
  opts.fine_steps = 2048;
  const SimReport r = lift_and_simulate(s.solution, s.lattice, kFp, s.pair, 5, 0, family(), opts);
  const double risk = query_risk(s.solution.surface, 5, 0);
  CHECK(risk > 1.0);
  for (const auto& st : r.strategies) {
    CHECK(st.mean_shortfall <= risk + 3 * st.stderr_shortfall + 0.05);
    CHECK(st.stderr_shortfall > 0);
  }
  CHECK(r.value_match_error > 0);
}

TEST_CASE("trace follows the embedded walk") {
  const Setup s(4, PayoffPair{PayoffKind::GamePut, 100, 10}, 5);
  SimOptions opts;
  opts.num_paths = 20;
  opts.fine_steps = 256;
  opts.trace = true;
  const SimReport r = lift_and_simulate(s.solution, s.lattice, kFp, s.pair, 5, 0, family(), opts);
  REQUIRE(r.trace.size() == 20 * 5);
  for (std::size_t p = 0; p < 20; ++p) {
    int ups = 0;
    for (int k = 0; k <= 4; ++k) {
      const TraceRow& row = r.trace[p * 5 + k];
      CHECK(row.path == p);
      CHECK(row.k == k);
      CHECK(row.lattice_price == s.lattice.price(k, ups));
      if (k < 4) ups += row.sign > 0;
    }
    // No trade at maturity; values are liquidation values, so closing is implicit.
    CHECK(r.trace[p * 5 + 4].action == Action::Expire);
    CHECK(r.trace[p * 5 + 4].shares == r.trace[p * 5 + 3].shares);
    bool cancelled = false;
    for (int k = 0; k < 4; ++k) {
      const TraceRow& row = r.trace[p * 5 + k];
      if (cancelled) CHECK(row.shares == 0.0);
      cancelled = cancelled || row.action == Action::Cancel || row.action == Action::ForcedAct;
    }
    CHECK(r.trace[p * 5].binomial_value == 5.0);
  }
}

TEST_CASE("same Brownian paths at two resolutions") {
  const Setup s(8, PayoffPair{PayoffKind::GamePut, 100, 10}, 5);
  SimOptions coarse;
  coarse.num_paths = 50;
  coarse.fine_steps = 256;
  coarse.path_steps = 1024;
  coarse.trace = true;
  SimOptions fine = coarse;
  fine.fine_steps = 1024;
  const SimReport a = lift_and_simulate(s.solution, s.lattice, kFp, s.pair, 5, 0, family(), coarse);
  const SimReport b = lift_and_simulate(s.solution, s.lattice, kFp, s.pair, 5, 0, family(), fine);
  // Coarse-grid passage times are never earlier than fine-grid ones for the first step.
  for (std::size_t p = 0; p < 50; ++p) CHECK(a.trace[p * 9 + 1].time >= b.trace[p * 9 + 1].time);
  SimOptions bad = coarse;
  bad.path_steps = 1000;
  CHECK_THROWS_AS(lift_and_simulate(s.solution, s.lattice, kFp, s.pair, 5, 0, family(), bad), std::invalid_argument);
}

TEST_CASE("too many incomplete embeddings fail the run") {
  const Setup s(16, PayoffPair{PayoffKind::GamePut, 100, 10}, 5);
  SimOptions opts;
  opts.num_paths = 200;
  opts.fine_steps = 64;
  opts.horizon_factor = 1.0;
  CHECK_THROWS_AS(lift_and_simulate(s.solution, s.lattice, kFp, s.pair, 5, 0, family(), opts), ContractViolation);
}

TEST_CASE("preconditions") {
  const Setup s(4, PayoffPair{PayoffKind::GamePut, 100, 2}, 5);
  SimOptions opts;
  opts.num_paths = 10;
  CHECK_THROWS_AS(lift_and_simulate(s.solution, s.lattice, kFp, s.pair, 5, 0, {}, opts), std::invalid_argument);
  CHECK_THROWS_AS(lift_and_simulate(s.solution, s.lattice, kFp, s.pair, 5, 0.05, family(), opts),
                  std::invalid_argument);
  const BinomialLattice other(kMarket, 5);
  CHECK_THROWS_AS(lift_and_simulate(s.solution, other, kFp, s.pair, 5, 0, family(), opts), std::invalid_argument);
}
