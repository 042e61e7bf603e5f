#pragma once

#include <cstdint>
#include <limits>
#include <string>
#include <vector>

#include "gamehedge/friction.hpp"
#include "gamehedge/model.hpp"
#include "gamehedge/payoff.hpp"
#include "gamehedge/solver.hpp"

namespace gamehedge {

/// Adapted exercise rule over embedding times: stop at the first theta_k
/// (k >= 1, theta_k < T) where Y - V > 0 and Y - V >= threshold, else at T.
struct BuyerStrategy {
  double threshold = std::numeric_limits<double>::infinity();

  std::string name() const;
};

BuyerStrategy buyer_threshold_strategy(double c);

struct SimOptions {
  int num_paths = 10'000;
  std::uint64_t seed = 1;
  int fine_steps = 4096;  ///< grid steps per [0, T]
  double horizon_factor = 4.0;
  /// Paths are drawn at this resolution and coarsened to fine_steps, so runs
  /// at different fine_steps see the same Brownian paths. 0 means fine_steps.
  int path_steps = 0;
  bool trace = false;
};

struct StrategyResult {
  BuyerStrategy strategy;
  double mean_shortfall = 0.0;
  double stderr_shortfall = 0.0;
};

/// One row of the optional per-path dump, one per embedding step.
struct TraceRow {
  std::uint64_t path;
  int k;
  double time;
  std::size_t grid_index;
  int sign;
  double price;
  double lattice_price;
  double binomial_value;
  double lifted_value;
  double shares;
  Action action;
};

struct PathSummary {
  std::uint64_t path;
  double value_at_T;
  double value_at_last_passage;
  bool cancelled;
  double cancel_time;
};

struct SimReport {
  std::uint64_t paths = 0;  ///< completed embeddings used in the statistics
  std::uint64_t incomplete_embeddings = 0;
  std::uint64_t admissibility_violations = 0;  ///< paths where V dipped below 0
  double worst_violation = 0.0;                ///< most negative V seen (0 if none)
  std::uint64_t policy_fallbacks = 0;  ///< lookups replaced by liquidation to stay admissible
  std::vector<StrategyResult> strategies;
  double value_match_error = 0.0;  ///< max |V lifted(theta_k) - V binomial(k)|
  double growth_stat = 0.0;        ///< mean of (max |gamma| S + int S |d gamma|)^2 on [0, T]
  std::vector<TraceRow> trace;
  std::vector<PathSummary> summaries;  ///< filled when tracing
};

/// Lift the solved binomial hedge into the continuous model through the
/// first-passage embedding and evaluate it by Monte Carlo.
///
/// The trading decisions depend only on the embedded signs: the binomial
/// portfolio is replayed on lattice prices and the policy is read at the cash
/// level just below its value, so every selected trade stays feasible and
/// admissible on the lattice. The lifted portfolio executes the same share
/// targets at the continuous prices at the embedding times. Cancellation at
/// binomial step k lifts to T ^ theta_k; the position is closed at theta_k and
/// stays flat. Without cancellation it is closed at theta_n.
///
/// Throws ContractViolation when more than 1% of embeddings are incomplete.
SimReport lift_and_simulate(const Solution& solution, const BinomialLattice& lattice,
                            const FrictionParams& friction, const PayoffPair& payoff, double z0,
                            double y0, const std::vector<BuyerStrategy>& buyers,
                            const SimOptions& options);

}  // namespace gamehedge
