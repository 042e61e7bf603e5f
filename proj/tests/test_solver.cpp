#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "gamehedge/solver.hpp"

using namespace gamehedge;

namespace {

const MarketParams kMarket(100, 0.2, 0.02, 1);
const FrictionParams kFp(0.5, 0.01);
const PayoffPair kPut{PayoffKind::GamePut, 100, 2};

// Independent trade-free Dynkin recursion at fixed cash z with no shares.
std::vector<std::vector<double>> dynkin_no_trade(const BinomialLattice& lattice, const PayoffPair& pair, double z) {
  const int n = lattice.steps();
  const double p = lattice.up_prob();
  std::vector<std::vector<double>> v(n + 1);
  for (int k = n; k >= 0; --k) {
    v[k].resize(k + 1);
    for (int j = 0; j <= k; ++j) {
      const std::vector<double> price{lattice.price(k, j)};
      const PayoffValue pay = evaluate(pair, price, k == n);
      const double buyer = std::max(pay.buyer - z, 0.0);
      if (k == n) {
        v[k][j] = buyer;
        continue;
      }
      const double wait = p * v[k + 1][j + 1] + (1 - p) * v[k + 1][j];
      v[k][j] = std::max(buyer, std::min(std::max(pay.seller - z, 0.0), wait));
    }
  }
  return v;
}

}  // namespace

TEST_CASE("grid construction") {
  const SolverGrid g = SolverGrid::uniform(30, 21, 2, 5);
  CHECK(g.z()[1] == 1.5);
  CHECK(g.y() == std::vector<double>{-2, -1, 0, 1, 2});
  CHECK(g.zero_y() == 2);
  CHECK(g.find_y(1.0) == 3);
  CHECK(g.find_y(0.5) == -1);
  CHECK(g.floor_z(1.49) == 0);
  CHECK(g.floor_z(1.5) == 1);
  CHECK(g.floor_z(99) == 20);
  CHECK_THROWS_AS(SolverGrid({0.5, 1}, {0}), std::invalid_argument);
  CHECK_THROWS_AS(SolverGrid({0, 1}, {-1, 1}), std::invalid_argument);
  CHECK_THROWS_AS(SolverGrid::uniform(30, 21, 2, 4), std::invalid_argument);
}

TEST_CASE("share bound and derived grid") {
  const BinomialLattice lattice(kMarket, 2);
  const PayoffTables tables = evaluate_on_lattice(kPut, lattice);
  const double bound = share_bound(lattice, kFp, 5, 0);
  CHECK(bound == std::ceil(6 / (0.01 * lattice.min_price())));
  const SolverGrid g = make_solver_grid(lattice, tables, kFp, GridSettings{}, 5, 0);
  CHECK(g.y().back() == 2.0);
  CHECK(g.ny() == 41);
  CHECK(g.z_max() == doctest::Approx(1.05 * tables.max_seller()));
  GridSettings fixed;
  fixed.z_max = 30;
  CHECK(make_solver_grid(lattice, tables, kFp, fixed, 5, 0).z_max() == 30);
}

TEST_CASE("terminal layer and continuation") {
  const BinomialLattice lattice(kMarket, 2);
  const PayoffTables tables = evaluate_on_lattice(kPut, lattice);
  const SolverGrid grid({0, 0.1, 10, 30}, {-1, 0, 1});
  const SolveContext ctx(lattice, tables, kFp, grid);
  const auto terminal = terminal_layer(ctx);
  const auto& layout = ctx.layout();
  CHECK(lattice.price(2, 0) == doctest::Approx(75.364).epsilon(1e-5));
  CHECK(terminal[layout.offset(0, 2, 1)] == doctest::Approx(100 - lattice.price(2, 0) - 10).epsilon(1e-14));
  CHECK(terminal[layout.offset(0, 2, 1)] == doctest::Approx(14.636).epsilon(1e-4));
  for (int yj = 0; yj < 3; ++yj) CHECK(terminal[layout.offset(0, 2, yj)] == terminal[layout.offset(0, 2, 1)]);
  CHECK(terminal[layout.offset(2, 3, 1)] == 0.0);

  // Holding one share with 0.1 of cash cannot survive a down move.
  CHECK_FALSE(continuation_value(ctx, 1, 1, 0.1, 2, terminal).has_value());
  CHECK(mark_to_market(lattice.price(1, 1), lattice.price(2, 1), 0.1, 1, kFp) < -13);

  std::vector<double> constant(layout.layer_size(2), 3.25);
  CHECK(*continuation_value(ctx, 1, 0, 0.1, 1, constant) == doctest::Approx(3.25).epsilon(1e-15));
  const double p = lattice.up_prob();
  CHECK(*continuation_value(ctx, 1, 0, 10, 1, terminal) ==
        p * terminal[layout.offset(1, 2, 1)] + (1 - p) * terminal[layout.offset(0, 2, 1)]);
}

TEST_CASE("step value structure") {
  const BinomialLattice lattice(kMarket, 2);
  const PayoffTables tables = evaluate_on_lattice(kPut, lattice);
  const SolverGrid grid = SolverGrid::uniform(30, 101, 2, 5);
  const SolveContext ctx(lattice, tables, kFp, grid);
  const auto terminal = terminal_layer(ctx);

  // Enough cash for every payoff: zero risk; ties go to the earliest seller action.
  StepResult r = step_value(ctx, 1, 0, 30, grid.zero_y(), terminal);
  CHECK(r.value == 0.0);
  CHECK(r.decision.action == Action::Cancel);

  // Below the fixed fee no trade is feasible.
  r = step_value(ctx, 1, 0, 0.3, grid.zero_y(), terminal);
  const auto wait = continuation_value(ctx, 1, 0, 0.3, grid.zero_y(), terminal);
  const double buyer = std::max(tables.buyer[1][0] - 0.3, 0.0);
  const double cancel = std::max(tables.seller[1][0] - 0.3, 0.0);
  CHECK(r.value == std::max(buyer, std::min(cancel, *wait)));
  CHECK(r.decision.action != Action::Trade);

  // Short two shares with no cash: holding fails on an up move, but closing
  // the position keeps the liquidation value, so the seller is never forced.
  CHECK_FALSE(continuation_value(ctx, 1, 0, 0.0, 0, terminal).has_value());
  r = step_value(ctx, 1, 0, 0.0, 0, terminal);
  CHECK(r.decision.action != Action::ForcedAct);
  CHECK(r.decision.action != Action::Wait);
}

TEST_CASE("superhedging cash gives zero risk") {
  for (int n : {2, 8, 32}) {
    const BinomialLattice lattice(kMarket, n);
    const PayoffTables tables = evaluate_on_lattice(kPut, lattice);
    const SolverGrid grid = make_solver_grid(lattice, tables, kFp, GridSettings{}, 30, 0);
    const Solution sol = solve(lattice, tables, kFp, grid);
    // X_0 = 2 <= 30: cancelling at once already covers the claim.
    CHECK(query_risk(sol.surface, 30, 0) == 0.0);
    // Cash above every X covers the claim at every node.
    for (int k = 0; k <= n; ++k)
      for (std::size_t j = 0; j <= std::size_t(k); ++j) CHECK(sol.surface.value(k, j, grid.nz() - 1, grid.zero_y()) == 0.0);
  }
  const BinomialLattice lattice(kMarket, 2);
  CHECK(evaluate_on_lattice(kPut, lattice).max_seller() == doctest::Approx(24.636).epsilon(1e-4));
}

TEST_CASE("below the fee the solver is the trade-free Dynkin game") {
  for (int n : {2, 8, 32}) {
    const BinomialLattice lattice(kMarket, n);
    const PayoffTables tables = evaluate_on_lattice(kPut, lattice);
    const SolverGrid grid = SolverGrid::uniform(75, 251, 2, 41);
    REQUIRE(grid.z()[1] == 0.3);
    const Solution sol = solve(lattice, tables, kFp, grid);
    const auto expected = dynkin_no_trade(lattice, kPut, 0.3);
    double worst = 0.0;
    for (int k = 0; k <= n; ++k)
      for (int j = 0; j <= k; ++j)
        worst = std::max(worst, std::abs(sol.surface.value(k, j, 1, grid.zero_y()) - expected[k][j]));
    CHECK(worst <= 1e-12);
  }
}

TEST_CASE("query") {
  const BinomialLattice lattice(kMarket, 4);
  const PayoffTables tables = evaluate_on_lattice(kPut, lattice);
  const SolverGrid grid = SolverGrid::uniform(36, 61, 2, 21);
  const Solution sol = solve(lattice, tables, kFp, grid);
  const auto row = sol.surface.cash_row(0, 0, grid.zero_y());
  for (int i = 0; i < grid.nz(); ++i) CHECK(query_risk(sol.surface, grid.z()[i], 0) == row[i]);
  double prev = query_risk(sol.surface, 0, 0);
  for (double z = 0.05; z < 36; z += 0.37) {
    const double q = query_risk(sol.surface, z, 0);
    const int i = grid.floor_z(z);
    CHECK(q <= row[i]);
    CHECK(q >= row[i + 1]);
    CHECK(q <= prev);
    prev = q;
  }
  CHECK(query_risk(sol.surface, 37, 0) == 0.0);
  CHECK_THROWS_AS(query_risk(sol.surface, -1, 0), std::invalid_argument);
  CHECK_THROWS_AS(query_risk(sol.surface, 1, 0.05), std::invalid_argument);
}

TEST_CASE("forced action never arises when flat is a share level") {
  const BinomialLattice lattice(kMarket, 6);
  const PayoffTables tables = evaluate_on_lattice(kPut, lattice);
  const SolverGrid grid = SolverGrid::uniform(42, 41, 2, 9);
  const Solution sol = solve(lattice, tables, kFp, grid);
  const SolveContext ctx(lattice, tables, kFp, grid);
  int forced = 0;
  for (int k = 0; k < 6; ++k) {
    for (int j = 0; j <= k; ++j) {
      for (int yj = 0; yj < grid.ny(); ++yj) {
        for (int zi = 0; zi < grid.nz(); ++zi) {
          const Decision& d = sol.policy.at(k, j, zi, yj);
          if (d.action != Action::ForcedAct) continue;
          ++forced;
          const double z = grid.z()[zi];
          const auto next = sol.surface.layer(k + 1);
          CHECK_FALSE(continuation_value(ctx, k, j, z, yj, next).has_value());
          for (int t = 0; t < grid.ny(); ++t) {
            if (t == yj) continue;
            const double after = post_trade_value(ctx.price(k, j), z, grid.y()[yj], grid.y()[t] - grid.y()[yj], kFp);
            if (after >= 0) CHECK_FALSE(continuation_value(ctx, k, j, after, t, next).has_value());
          }
          CHECK(sol.surface.value(k, j, zi, yj) == std::max(tables.seller[k][j] - z, 0.0));
        }
      }
    }
  }
  // Closing out keeps the liquidation value and no shares is always admissible,
  // so with 0 on the share grid nothing is ever forced.
  CHECK(forced == 0);
  for (int j = 0; j <= 6; ++j) CHECK(sol.policy.at(6, j, 0, 0).action == Action::Expire);
}

TEST_CASE("path-dependent payoffs solve on the path tree") {
  const BinomialLattice lattice(kMarket, 6);
  const PayoffPair look{PayoffKind::LookbackGamePut, 100, 2};
  const PayoffTables tables = evaluate_on_lattice(look, lattice);
  const SolverGrid grid = make_solver_grid(lattice, tables, kFp, GridSettings{}, 5, 0);
  const Solution sol = solve(lattice, tables, kFp, grid);
  CHECK(sol.surface.layout().tree().count(6) == 64);
  CHECK(query_risk(sol.surface, 1, 0) >= 0.0);
}

TEST_CASE("inputs are validated") {
  const BinomialLattice lattice(kMarket, 2);
  const PayoffTables tables = evaluate_on_lattice(kPut, lattice);
  CHECK_THROWS_AS(solve(lattice, tables, kFp, SolverGrid::uniform(10, 11, 1, 3)), std::invalid_argument);
  const BinomialLattice other(kMarket, 3);
  CHECK_THROWS_AS(solve(other, tables, kFp, SolverGrid::uniform(30, 11, 1, 3)), std::invalid_argument);
}

TEST_CASE("solve is deterministic") {
  const BinomialLattice lattice(kMarket, 8);
  const PayoffTables tables = evaluate_on_lattice(kPut, lattice);
  const SolverGrid grid = SolverGrid::uniform(45, 51, 2, 11);
  const Solution a = solve(lattice, tables, kFp, grid);
  const Solution b = solve(lattice, tables, kFp, grid);
  for (int k = 0; k <= 8; ++k) {
    const auto la = a.surface.layer(k);
    const auto lb = b.surface.layer(k);
    CHECK(std::equal(la.begin(), la.end(), lb.begin()));
  }
}
