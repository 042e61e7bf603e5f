#pragma once

#include <cstdint>
#include <filesystem>
#include <limits>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "gamehedge/experiments.hpp"
#include "gamehedge/friction.hpp"
#include "gamehedge/lift.hpp"
#include "gamehedge/model.hpp"
#include "gamehedge/payoff.hpp"
#include "gamehedge/solver.hpp"

namespace gamehedge {

/// Everything one CLI run needs. Parsed from an INI file:
///
///   [market]     s, kappa, vartheta, T                 (required)
///   [friction]   delta, mu                             (required)
///   [payoff]     kind, strike, penalty                 (required)
///   [position]   z, y                                  (required)
///   [solver]     n, z_steps, y_steps, y_max_cap, z_max_factor, z_max
///   [sim]        paths, seed, fine_steps, horizon_factor, thresholds
///   [experiment] n_list, z_points_per_sqrt_n, z_points_cap
///   [output]     surface = all | root
///
/// Lists are comma separated; thresholds accept `inf`. Unknown sections or
/// keys are errors.
struct RunConfig {
  struct Market {
    double s = 0.0;
    double kappa = 0.0;
    double vartheta = 0.0;
    double T = 0.0;
    bool operator==(const Market&) const = default;
  } market;
  struct Friction {
    double delta = 0.0;
    double mu = 0.0;
    bool operator==(const Friction&) const = default;
  } friction;
  PayoffPair payoff;
  struct Position {
    double z = 0.0;
    double y = 0.0;
    bool operator==(const Position&) const = default;
  } position;
  struct Solver {
    int n = 16;
    GridSettings grid;
    bool operator==(const Solver&) const = default;
  } solver;
  struct Sim {
    int paths = 10'000;
    std::uint64_t seed = 1;
    int fine_steps = 4096;
    double horizon_factor = 4.0;
    std::vector<double> thresholds{0.0, 0.25, 0.5, 1.0, 2.0, 4.0, 8.0, std::numeric_limits<double>::infinity()};
    bool operator==(const Sim&) const = default;
  } sim;
  struct Experiment {
    std::vector<int> n_list{8, 16, 32, 64};
    double z_points_per_sqrt_n = 36.0;
    int z_points_cap = 801;
    bool operator==(const Experiment&) const = default;
  } experiment;
  struct Output {
    bool full_surface = true;
    bool operator==(const Output&) const = default;
  } output;

  MarketParams market_params() const;
  FrictionParams friction_params() const;
  SimOptions sim_options() const;
  std::vector<BuyerStrategy> buyers() const;
  ConvergenceConfig convergence_config() const;

  bool operator==(const RunConfig&) const = default;
};

/// Throws ConfigError naming the offending field path (e.g. "friction.delta").
RunConfig parse_config(std::string_view text);
RunConfig load_config(const std::filesystem::path& path);

/// INI text that parses back to an equal RunConfig.
std::string write_config(const RunConfig& config);

}  // namespace gamehedge
