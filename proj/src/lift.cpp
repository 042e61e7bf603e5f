#include "gamehedge/lift.hpp"

#include <algorithm>
#include <cmath>
#include <span>
#include <sstream>
#include <stdexcept>

#include "gamehedge/errors.hpp"
#include "gamehedge/rng.hpp"

namespace gamehedge {

std::string BuyerStrategy::name() const {
  if (std::isinf(threshold)) return "threshold=inf";
  std::ostringstream os;
  os << "threshold=" << threshold;
  return os.str();
}

BuyerStrategy buyer_threshold_strategy(double c) {
  if (!(c >= 0.0)) throw std::invalid_argument("buyer threshold must be >= 0");
  return BuyerStrategy{c};
}

namespace {

struct PathOutcome {
  bool complete = false;
  bool violated = false;
  double worst = 0.0;
  double match_error = 0.0;
  double growth = 0.0;
  std::uint64_t fallbacks = 0;
  std::vector<double> shortfalls;
  std::vector<TraceRow> trace;
  PathSummary summary{};
};

class PathReplay {
 public:
  PathReplay(const Solution& solution, const BinomialLattice& lattice, const FrictionParams& friction,
             const PayoffPair& payoff, double z0, double y0, const std::vector<BuyerStrategy>& buyers,
             const SimOptions& options)
      : sol_(solution),
        lattice_(lattice),
        fp_(friction),
        payoff_(payoff),
        z0_(z0),
        y0_(y0),
        buyers_(buyers),
        opts_(options) {}

  PathOutcome run(std::uint64_t path_id) const {
    PathOutcome out;
    const int resolution = opts_.path_steps > 0 ? opts_.path_steps : opts_.fine_steps;
    PathSample path =
        sample_path(lattice_.market(), resolution, opts_.horizon_factor, derive_seed(opts_.seed, path_id));
    if (resolution != opts_.fine_steps) path = coarsen(path, resolution / opts_.fine_steps);

    const int n = lattice_.steps();
    const EmbeddedWalk walk = extract_embedding(path, n);
    if (!walk.complete) return out;
    out.complete = true;

    const auto& grid = sol_.surface.grid();
    const auto& ys = grid.y();
    const auto& tree = sol_.policy.layout().tree();
    const auto maturity = static_cast<std::size_t>(opts_.fine_steps);
    const auto& prices = path.prices;

    double binomial = z0_;
    double lifted = z0_;
    int level = grid.find_y(y0_);
    double shares = y0_;
    std::size_t node = 0;
    int ups = 0;
    int cancel_step = -1;
    double value_at_T = 0.0;
    double exposure = std::abs(shares) * prices[0];
    double turnover = 0.0;
    std::vector<double> value_before(static_cast<std::size_t>(n) + 1);

    for (int k = 0; k <= n; ++k) {
      const std::size_t at = walk.hit_indices[static_cast<std::size_t>(k)];
      const double price = prices[at];
      const double lattice_price = lattice_.price(k, ups);
      const double binomial_before = binomial;
      value_before[static_cast<std::size_t>(k)] = lifted;
      out.match_error = std::max(out.match_error, std::abs(lifted - binomial));

      if (k == n) {
        // Flat after the last passage; liquidation keeps the liquidation value.
        if (shares != 0.0 && at <= maturity) turnover += price * std::abs(shares);
        if (opts_.trace) {
          out.trace.push_back({path_id, k, path.times[at], at, 0, price, lattice_price, binomial,
                               lifted, shares, Action::Expire});
        }
        if (at < maturity) value_at_T = lifted;
        break;
      }

      // Once cancelled the game is over: the position is closed at the
      // cancellation passage and stays flat.
      Decision decision{Action::Cancel, false, -1};
      if (cancel_step < 0) decision = sol_.policy.at(k, node, grid.floor_z(binomial), level);
      if (cancel_step < 0 && (decision.action == Action::Cancel || decision.action == Action::ForcedAct)) {
        cancel_step = k;
      }
      int target = decision.action == Action::Trade ? decision.target : level;
      if (cancel_step >= 0) {
        target = grid.zero_y();
      } else if (!admissible_on_lattice(k, ups, lattice_price, binomial, shares,
                                        ys[static_cast<std::size_t>(target)])) {
        ++out.fallbacks;
        target = grid.zero_y();
      }

      const double beta = ys[static_cast<std::size_t>(target)] - shares;
      if (beta != 0.0) {
        binomial = post_trade_value(lattice_price, binomial, shares, beta, fp_);
        lifted = post_trade_value(price, lifted, shares, beta, fp_);
        if (at <= maturity) turnover += price * std::abs(beta);
        shares = ys[static_cast<std::size_t>(target)];
        level = target;
      }
      if (opts_.trace) {
        out.trace.push_back({path_id, k, path.times[at], at, walk.signs[static_cast<std::size_t>(k)],
                             price, lattice_price, binomial_before, value_before[static_cast<std::size_t>(k)],
                             shares, decision.action});
      }

      const std::size_t next = walk.hit_indices[static_cast<std::size_t>(k) + 1];
      for (std::size_t i = at + 1; i <= next; ++i) {
        const double v = mark_to_market(price, prices[i], lifted, shares, fp_);
        if (v < 0.0) {
          out.violated = true;
          out.worst = std::min(out.worst, v);
        }
        if (i <= maturity) exposure = std::max(exposure, std::abs(shares) * prices[i]);
        if (i == maturity) value_at_T = v;
      }

      const bool up = walk.signs[static_cast<std::size_t>(k)] > 0;
      lifted = mark_to_market(price, prices[next], lifted, shares, fp_);
      binomial = mark_to_market(lattice_price, lattice_.price(k + 1, ups + (up ? 1 : 0)), binomial, shares, fp_);
      node = up ? tree.up_child(k, node) : tree.down_child(k, node);
      if (up) ++ups;
    }

    out.growth = (exposure + turnover) * (exposure + turnover);

    // Cancellation lifts to T ^ theta_k.
    std::size_t sigma = maturity;
    double sigma_value = value_at_T;
    if (cancel_step >= 0) {
      const std::size_t at = walk.hit_indices[static_cast<std::size_t>(cancel_step)];
      if (at < maturity) {
        sigma = at;
        sigma_value = value_before[static_cast<std::size_t>(cancel_step)];
      }
    }
    const PayoffValue at_sigma = payoff_at(path, sigma, maturity);
    const PayoffValue at_T = payoff_at(path, maturity, maturity);

    std::vector<double> gap(static_cast<std::size_t>(n) + 1, 0.0);
    std::vector<PayoffValue> at_hit(static_cast<std::size_t>(n) + 1, PayoffValue{0.0, 0.0});
    int last_before_T = 0;
    for (int k = 1; k <= n; ++k) {
      const std::size_t at = walk.hit_indices[static_cast<std::size_t>(k)];
      if (at >= maturity) break;
      at_hit[static_cast<std::size_t>(k)] = payoff_at(path, at, maturity);
      gap[static_cast<std::size_t>(k)] =
          at_hit[static_cast<std::size_t>(k)].buyer - value_before[static_cast<std::size_t>(k)];
      last_before_T = k;
    }

    out.shortfalls.reserve(buyers_.size());
    for (const BuyerStrategy& buyer : buyers_) {
      std::size_t tau = maturity;
      double tau_value = value_at_T;
      double tau_payoff = at_T.buyer;
      for (int k = 1; k <= last_before_T; ++k) {
        const double g = gap[static_cast<std::size_t>(k)];
        if (g > 0.0 && g >= buyer.threshold) {
          tau = walk.hit_indices[static_cast<std::size_t>(k)];
          tau_value = value_before[static_cast<std::size_t>(k)];
          tau_payoff = at_hit[static_cast<std::size_t>(k)].buyer;
          break;
        }
      }
      const double shortfall = tau <= sigma ? std::max(tau_payoff - tau_value, 0.0)
                                            : std::max(at_sigma.seller - sigma_value, 0.0);
      out.shortfalls.push_back(shortfall);
    }

    out.summary = {path_id, value_at_T, value_before[static_cast<std::size_t>(n)], cancel_step >= 0,
                   cancel_step >= 0 ? path.times[sigma] : path.times[maturity]};
    return out;
  }

 private:
  bool admissible_on_lattice(int k, int ups, double lattice_price, double value, double shares,
                             double target) const {
    const double beta = target - shares;
    const double after = beta == 0.0 ? value : post_trade_value(lattice_price, value, shares, beta, fp_);
    if (after < 0.0) return false;
    for (int up = 0; up <= 1; ++up) {
      if (mark_to_market(lattice_price, lattice_.price(k + 1, ups + up), after, target, fp_) < 0.0) return false;
    }
    return true;
  }

  PayoffValue payoff_at(const PathSample& path, std::size_t index, std::size_t maturity) const {
    return evaluate(payoff_, std::span<const double>(path.prices.data(), index + 1), index >= maturity);
  }

  const Solution& sol_;
  const BinomialLattice& lattice_;
  const FrictionParams& fp_;
  const PayoffPair& payoff_;
  double z0_;
  double y0_;
  const std::vector<BuyerStrategy>& buyers_;
  const SimOptions& opts_;
};

}  // namespace

SimReport lift_and_simulate(const Solution& solution, const BinomialLattice& lattice,
                            const FrictionParams& friction, const PayoffPair& payoff, double z0,
                            double y0, const std::vector<BuyerStrategy>& buyers,
                            const SimOptions& options) {
  if (buyers.empty()) throw std::invalid_argument("at least one buyer strategy is required");
  if (options.num_paths < 1) throw std::invalid_argument("sim.paths must be >= 1");
  if (options.fine_steps < 1) throw std::invalid_argument("sim.fine_steps must be >= 1");
  if (options.path_steps > 0 && options.path_steps % options.fine_steps != 0)
    throw std::invalid_argument("path resolution must be a multiple of sim.fine_steps");
  const int n = lattice.steps();
  if (solution.surface.steps() != n) throw std::invalid_argument("policy solved for a different n");
  for (int k = 0; k <= n; ++k) {
    if (!solution.policy.has_layer(k)) throw std::invalid_argument("lifting needs every policy layer");
  }
  if (solution.surface.grid().find_y(y0) < 0) throw std::invalid_argument("y0 must be a grid level");
  if (!(z0 >= 0.0)) throw std::invalid_argument("z0 must be >= 0");

  const PathReplay replay(solution, lattice, friction, payoff, z0, y0, buyers, options);
  const auto count = static_cast<std::ptrdiff_t>(options.num_paths);
  std::vector<PathOutcome> outcomes(static_cast<std::size_t>(count));

#pragma omp parallel for schedule(dynamic, 16)
  for (std::ptrdiff_t i = 0; i < count; ++i) {
    outcomes[static_cast<std::size_t>(i)] = replay.run(static_cast<std::uint64_t>(i));
  }

  SimReport report;
  std::vector<double> sum(buyers.size(), 0.0);
  std::vector<double> sum_sq(buyers.size(), 0.0);
  double growth = 0.0;
  for (const PathOutcome& o : outcomes) {
    if (!o.complete) {
      ++report.incomplete_embeddings;
      continue;
    }
    ++report.paths;
    if (o.violated) ++report.admissibility_violations;
    report.worst_violation = std::min(report.worst_violation, o.worst);
    report.value_match_error = std::max(report.value_match_error, o.match_error);
    report.policy_fallbacks += o.fallbacks;
    growth += o.growth;
    for (std::size_t b = 0; b < buyers.size(); ++b) {
      sum[b] += o.shortfalls[b];
      sum_sq[b] += o.shortfalls[b] * o.shortfalls[b];
    }
    if (options.trace) {
      report.trace.insert(report.trace.end(), o.trace.begin(), o.trace.end());
      report.summaries.push_back(o.summary);
    }
  }

  const auto used = static_cast<double>(report.paths);
  if (report.paths > 0) report.growth_stat = growth / used;
  for (std::size_t b = 0; b < buyers.size(); ++b) {
    StrategyResult r{buyers[b], 0.0, 0.0};
    if (report.paths > 0) {
      r.mean_shortfall = sum[b] / used;
      if (report.paths > 1) {
        const double var = std::max(sum_sq[b] - used * r.mean_shortfall * r.mean_shortfall, 0.0) / (used - 1.0);
        r.stderr_shortfall = std::sqrt(var / used);
      }
    }
    report.strategies.push_back(r);
  }

  if (report.incomplete_embeddings * 100 > static_cast<std::uint64_t>(options.num_paths)) {
    throw ContractViolation("embedding incomplete on " + std::to_string(report.incomplete_embeddings) +
                            " of " + std::to_string(options.num_paths) +
                            " paths (> 1%); raise sim.horizon_factor");
  }
  return report;
}

}  // namespace gamehedge
