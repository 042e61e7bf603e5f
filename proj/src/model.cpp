#include "gamehedge/model.hpp"

#include <bit>
#include <cmath>
#include <stdexcept>
#include <string>

#include "gamehedge/errors.hpp"
#include "gamehedge/rng.hpp"

namespace gamehedge {

MarketParams::MarketParams(double s, double kappa, double vartheta, double T)
    : s_(s), kappa_(kappa), vartheta_(vartheta), T_(T) {
  if (!(s > 0.0) || !std::isfinite(s)) throw std::invalid_argument("market.s must be > 0");
  if (!(kappa > 0.0) || !std::isfinite(kappa))
    throw std::invalid_argument("market.kappa must be > 0");
  if (!std::isfinite(vartheta)) throw std::invalid_argument("market.vartheta must be finite");
  if (!(T > 0.0) || !std::isfinite(T)) throw std::invalid_argument("market.T must be > 0");
}

double binomial_up_prob(const MarketParams& params, int n) {
  if (n < 1) throw std::invalid_argument("binomial step count must be >= 1");
  const double kappa = params.kappa();
  // (kappa - 2 vartheta / kappa) written so that vartheta = kappa^2 / 2 cancels exactly.
  const double exponent =
      (kappa * kappa - 2.0 * params.vartheta()) / kappa * std::sqrt(params.T() / n);
  return 1.0 / (std::exp(exponent) + 1.0);
}

double martingale_up_prob(double log_step) { return 1.0 / (std::exp(log_step) + 1.0); }

BinomialLattice::BinomialLattice(const MarketParams& params, int n)
    : market_(params),
      n_(n),
      h_(params.T() / n),
      up_prob_(binomial_up_prob(params, n)),
      log_step_(params.kappa() * std::sqrt(params.T() / n)) {}

double BinomialLattice::price(int k, int j) const {
  return market_.s() * std::exp(log_step_ * (2 * j - k));
}

BinomialLattice build_lattice(const MarketParams& params, int n) {
  return BinomialLattice(params, n);
}

double rn_density(const MarketParams& params, double w_t, double t) {
  const double ratio = params.vartheta() / params.kappa();
  return std::exp(-ratio * w_t - 0.5 * ratio * ratio * t);
}

TreeIndex::TreeIndex(Kind kind, int n) : kind_(kind), n_(n) {
  if (n < 1) throw std::invalid_argument("tree step count must be >= 1");
  if (kind == Kind::PathTree && n > kMaxPathTreeSteps) {
    throw SizeError("path-dependent payoffs need a non-recombining tree; n = " +
                    std::to_string(n) + " exceeds the limit of " +
                    std::to_string(kMaxPathTreeSteps));
  }
}

std::size_t TreeIndex::count(int k) const {
  return kind_ == Kind::Recombining ? static_cast<std::size_t>(k) + 1
                                    : std::size_t{1} << k;
}

std::size_t TreeIndex::up_child(int k, std::size_t node) const {
  return kind_ == Kind::Recombining ? node + 1 : node | (std::size_t{1} << k);
}

std::size_t TreeIndex::down_child(int, std::size_t node) const { return node; }

int TreeIndex::ups(int, std::size_t node) const {
  return kind_ == Kind::Recombining ? static_cast<int>(node)
                                    : std::popcount(static_cast<std::uint64_t>(node));
}

PathSample sample_path(const MarketParams& params, int steps_m, double horizon_factor,
                       std::uint64_t seed) {
  if (steps_m < 1) throw std::invalid_argument("steps_m must be >= 1");
  if (!(horizon_factor >= 1.0)) throw std::invalid_argument("horizon_factor must be >= 1");

  const double dt = params.T() / steps_m;
  const auto total = static_cast<std::size_t>(std::ceil(steps_m * horizon_factor - 1e-9));
  const double kappa = params.kappa();
  const double drift = (params.vartheta() - 0.5 * kappa * kappa) / kappa * dt;
  const double vol = std::sqrt(dt);

  PathSample path;
  path.maturity = params.T();
  path.steps_per_maturity = steps_m;
  path.times.resize(total + 1);
  path.w_star.resize(total + 1);
  path.prices.resize(total + 1);

  Engine engine(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  path.w_star[0] = 0.0;
  for (std::size_t i = 1; i <= total; ++i) {
    path.w_star[i] = path.w_star[i - 1] + drift + vol * normal(engine);
  }
  for (std::size_t i = 0; i <= total; ++i) {
    path.times[i] = static_cast<double>(i) * dt;
    path.prices[i] = params.s() * std::exp(kappa * path.w_star[i]);
  }
  return path;
}

PathSample coarsen(const PathSample& path, int factor) {
  if (factor < 1 || path.steps_per_maturity % factor != 0) {
    throw std::invalid_argument("coarsening factor must divide the steps per maturity");
  }
  PathSample out;
  out.maturity = path.maturity;
  out.steps_per_maturity = path.steps_per_maturity / factor;
  for (std::size_t i = 0; i < path.times.size(); i += static_cast<std::size_t>(factor)) {
    out.times.push_back(path.times[i]);
    out.w_star.push_back(path.w_star[i]);
    out.prices.push_back(path.prices[i]);
  }
  return out;
}

EmbeddedWalk extract_embedding(const PathSample& path, int n) {
  if (n < 1) throw std::invalid_argument("embedding step count must be >= 1");
  if (path.w_star.empty()) throw std::invalid_argument("empty path");

  const double level = std::sqrt(path.maturity / n);
  EmbeddedWalk walk;
  walk.hit_indices.reserve(static_cast<std::size_t>(n) + 1);
  walk.signs.reserve(static_cast<std::size_t>(n));
  walk.hit_indices.push_back(0);

  double ref = path.w_star[0];
  for (std::size_t i = 1; i < path.w_star.size() && walk.signs.size() < static_cast<std::size_t>(n);
       ++i) {
    const double move = path.w_star[i] - ref;
    if (std::abs(move) >= level) {
      walk.hit_indices.push_back(i);
      walk.signs.push_back(move > 0.0 ? 1 : -1);
      ref = path.w_star[i];
    }
  }
  walk.complete = walk.signs.size() == static_cast<std::size_t>(n);
  const std::size_t last = path.w_star.size() - 1;
  while (walk.hit_indices.size() < static_cast<std::size_t>(n) + 1) walk.hit_indices.push_back(last);
  while (walk.signs.size() < static_cast<std::size_t>(n)) walk.signs.push_back(0);
  return walk;
}

}  // namespace gamehedge
