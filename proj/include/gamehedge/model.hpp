#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace gamehedge {

/// Black-Scholes primitives: S_t = s exp(kappa W_t + (vartheta - kappa^2/2) t).
class MarketParams {
 public:
  /// Throws std::invalid_argument unless s > 0, kappa > 0, T > 0.
  MarketParams(double s, double kappa, double vartheta, double T);

  double s() const { return s_; }
  double kappa() const { return kappa_; }
  double vartheta() const { return vartheta_; }
  double T() const { return T_; }

 private:
  double s_;
  double kappa_;
  double vartheta_;
  double T_;
};

/// Real-world probability of an up-move in the n-step binomial market.
double binomial_up_prob(const MarketParams& params, int n);

/// Probability q making the lattice price a martingale: q e^a + (1-q) e^-a = 1.
double martingale_up_prob(double log_step);

/// Recombining n-step lattice; node (k, j) has j up-moves after k steps.
class BinomialLattice {
 public:
  BinomialLattice(const MarketParams& params, int n);

  const MarketParams& market() const { return market_; }
  int steps() const { return n_; }
  double step_length() const { return h_; }
  double up_prob() const { return up_prob_; }
  double log_step() const { return log_step_; }

  /// s exp(log_step (2j - k)), 0 <= j <= k <= n.
  double price(int k, int j) const;
  double min_price() const { return price(n_, 0); }
  double max_price() const { return price(n_, n_); }

 private:
  MarketParams market_;
  int n_;
  double h_;
  double up_prob_;
  double log_step_;
};

BinomialLattice build_lattice(const MarketParams& params, int n);

/// Density of the martingale measure w.r.t. P on F_t, as a function of W_t.
double rn_density(const MarketParams& params, double w_t, double t);

/// Node topology shared by payoff tables, the solver and the oracle.
///
/// Recombining trees index nodes at step k by their number of up-moves.
/// Path trees index nodes by the bit pattern of the moves so far (bit i set
/// when move i+1 went up) and are used for path-dependent payoffs.
class TreeIndex {
 public:
  enum class Kind { Recombining, PathTree };

  /// Path trees are limited to n <= 20; larger requests throw SizeError.
  TreeIndex(Kind kind, int n);

  Kind kind() const { return kind_; }
  int steps() const { return n_; }
  std::size_t count(int k) const;
  std::size_t up_child(int k, std::size_t node) const;
  std::size_t down_child(int k, std::size_t node) const;
  int ups(int k, std::size_t node) const;

  static constexpr int kMaxPathTreeSteps = 20;

 private:
  Kind kind_;
  int n_;
};

/// Fine-grid simulation of W*_t = (ln S_t - ln s) / kappa.
struct PathSample {
  std::vector<double> times;
  std::vector<double> w_star;
  std::vector<double> prices;
  double maturity = 0.0;
  int steps_per_maturity = 0;
};

/// Exact-in-law Gaussian increments on a uniform grid with steps_m steps per
/// [0, T], covering [0, horizon_factor T]. Deterministic in seed.
PathSample sample_path(const MarketParams& params, int steps_m, double horizon_factor,
                       std::uint64_t seed);

/// Keep every factor-th grid point; the result is the same Brownian path seen
/// on a coarser grid.
PathSample coarsen(const PathSample& path, int factor);

/// First-passage skeleton of a path for the +-sqrt(T/n) random walk.
struct EmbeddedWalk {
  /// n + 1 entries; entries past the last passage saturate at the final grid index.
  std::vector<std::size_t> hit_indices;
  /// n entries in {+1, -1}; 0 for passages that did not occur.
  std::vector<int> signs;
  bool complete = false;
};

EmbeddedWalk extract_embedding(const PathSample& path, int n);

}  // namespace gamehedge
