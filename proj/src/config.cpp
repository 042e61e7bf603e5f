#include "gamehedge/config.hpp"

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "gamehedge/csv.hpp"
#include "gamehedge/errors.hpp"

namespace gamehedge {

namespace pt = boost::property_tree;

namespace {

const std::map<std::string, std::set<std::string>>& schema() {
  static const std::map<std::string, std::set<std::string>> s{
      {"market", {"s", "kappa", "vartheta", "T"}},
      {"friction", {"delta", "mu"}},
      {"payoff", {"kind", "strike", "penalty"}},
      {"position", {"z", "y"}},
      {"solver", {"n", "z_steps", "y_steps", "y_max_cap", "z_max_factor", "z_max"}},
      {"sim", {"paths", "seed", "fine_steps", "horizon_factor", "thresholds"}},
      {"experiment", {"n_list", "z_points_per_sqrt_n", "z_points_cap"}},
      {"output", {"surface"}},
  };
  return s;
}

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

class Reader {
 public:
  explicit Reader(const pt::ptree& tree) : tree_(tree) {}

  std::optional<std::string> raw(const std::string& section, const std::string& key) const {
    const auto sec = tree_.get_child_optional(section);
    if (!sec) return std::nullopt;
    const auto v = sec->get_optional<std::string>(pt::ptree::path_type(key, '\0'));
    if (!v) return std::nullopt;
    return trim(*v);
  }

  std::string required(const std::string& section, const std::string& key) const {
    auto v = raw(section, key);
    if (!v) throw ConfigError(section + "." + key + ": missing required field");
    return *v;
  }

  static double to_double(const std::string& field, const std::string& text) {
    std::string t = trim(text);
    if (t == "inf" || t == "+inf") return std::numeric_limits<double>::infinity();
    double v = 0.0;
    const auto res = std::from_chars(t.data(), t.data() + t.size(), v);
    if (t.empty() || res.ec != std::errc() || res.ptr != t.data() + t.size())
      throw ConfigError(field + ": not a number: '" + text + "'");
    return v;
  }

  static long long to_int(const std::string& field, const std::string& text) {
    const std::string t = trim(text);
    long long v = 0;
    const auto res = std::from_chars(t.data(), t.data() + t.size(), v);
    if (t.empty() || res.ec != std::errc() || res.ptr != t.data() + t.size())
      throw ConfigError(field + ": not an integer: '" + text + "'");
    return v;
  }

  double number(const std::string& section, const std::string& key) const {
    return to_double(section + "." + key, required(section, key));
  }
  void number(const std::string& section, const std::string& key, double& out) const {
    if (auto v = raw(section, key)) out = to_double(section + "." + key, *v);
  }
  void integer(const std::string& section, const std::string& key, int& out) const {
    if (auto v = raw(section, key)) {
      const long long x = to_int(section + "." + key, *v);
      if (x < std::numeric_limits<int>::min() || x > std::numeric_limits<int>::max())
        throw ConfigError(section + "." + key + ": out of range");
      out = static_cast<int>(x);
    }
  }

  template <class T, class F>
  static std::vector<T> list(const std::string& field, const std::string& text, F convert) {
    std::vector<T> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) out.push_back(static_cast<T>(convert(field, item)));
    if (out.empty()) throw ConfigError(field + ": empty list");
    return out;
  }

 private:
  const pt::ptree& tree_;
};

void require(bool ok, const std::string& field, const std::string& what) {
  if (!ok) throw ConfigError(field + ": " + what);
}

void validate(const RunConfig& c) {
  require(c.market.s > 0.0 && std::isfinite(c.market.s), "market.s", "must be > 0");
  require(c.market.kappa > 0.0 && std::isfinite(c.market.kappa), "market.kappa", "must be > 0");
  require(std::isfinite(c.market.vartheta), "market.vartheta", "must be finite");
  require(c.market.T > 0.0 && std::isfinite(c.market.T), "market.T", "must be > 0");
  require(c.friction.delta > 0.0 && std::isfinite(c.friction.delta), "friction.delta", "must be > 0");
  require(c.friction.mu > 0.0 && c.friction.mu < 1.0, "friction.mu", "must be in (0, 1)");
  require(c.payoff.strike > 0.0 && std::isfinite(c.payoff.strike), "payoff.strike", "must be > 0");
  require(c.payoff.penalty >= 0.0 && std::isfinite(c.payoff.penalty), "payoff.penalty", "must be >= 0");
  require(c.position.z >= 0.0 && std::isfinite(c.position.z), "position.z", "must be >= 0");
  require(std::isfinite(c.position.y), "position.y", "must be finite");
  require(c.solver.n >= 1, "solver.n", "must be >= 1");
  if (c.payoff.path_dependent())
    require(c.solver.n <= TreeIndex::kMaxPathTreeSteps, "solver.n", "path-dependent payoffs need n <= 20");
  const GridSettings& g = c.solver.grid;
  require(g.z_steps >= 2, "solver.z_steps", "must be >= 2");
  require(g.y_steps >= 1 && g.y_steps % 2 == 1, "solver.y_steps", "must be odd and >= 1");
  require(g.y_max_cap > 0.0 && std::isfinite(g.y_max_cap), "solver.y_max_cap", "must be > 0");
  require(g.z_max_factor >= 1.0 && std::isfinite(g.z_max_factor), "solver.z_max_factor", "must be >= 1");
  require(g.z_max >= 0.0 && std::isfinite(g.z_max), "solver.z_max", "must be >= 0 (0 = derived)");
  require(c.sim.paths >= 1, "sim.paths", "must be >= 1");
  require(c.sim.fine_steps >= 1, "sim.fine_steps", "must be >= 1");
  require(c.sim.horizon_factor >= 1.0 && std::isfinite(c.sim.horizon_factor), "sim.horizon_factor",
          "must be >= 1");
  for (double t : c.sim.thresholds) require(t >= 0.0, "sim.thresholds", "entries must be >= 0");
  for (std::size_t i = 0; i < c.experiment.n_list.size(); ++i) {
    require(c.experiment.n_list[i] >= 1, "experiment.n_list", "entries must be >= 1");
    if (i > 0)
      require(c.experiment.n_list[i] >= c.experiment.n_list[i - 1], "experiment.n_list", "must be increasing");
  }
  require(c.experiment.z_points_per_sqrt_n > 0.0, "experiment.z_points_per_sqrt_n", "must be > 0");
  require(c.experiment.z_points_cap >= 21, "experiment.z_points_cap", "must be >= 21");
}

}  // namespace

MarketParams RunConfig::market_params() const {
  return MarketParams(market.s, market.kappa, market.vartheta, market.T);
}

FrictionParams RunConfig::friction_params() const { return FrictionParams(friction.delta, friction.mu); }

SimOptions RunConfig::sim_options() const {
  SimOptions o;
  o.num_paths = sim.paths;
  o.seed = sim.seed;
  o.fine_steps = sim.fine_steps;
  o.horizon_factor = sim.horizon_factor;
  return o;
}

std::vector<BuyerStrategy> RunConfig::buyers() const {
  std::vector<BuyerStrategy> out;
  for (double t : sim.thresholds) out.push_back(buyer_threshold_strategy(t));
  return out;
}

ConvergenceConfig RunConfig::convergence_config() const {
  ConvergenceConfig c{market_params(), friction_params(), payoff, solver.grid, position.z, position.y};
  c.z_points_per_sqrt_n = experiment.z_points_per_sqrt_n;
  c.z_points_cap = experiment.z_points_cap;
  return c;
}

RunConfig parse_config(std::string_view text) {
  pt::ptree tree;
  try {
    std::istringstream in{std::string(text)};
    pt::read_ini(in, tree);
  } catch (const pt::ini_parser_error& e) {
    throw ConfigError(std::string("config syntax: ") + e.message() + " (line " + std::to_string(e.line()) + ")");
  }

  for (const auto& [section, body] : tree) {
    const auto it = schema().find(section);
    if (it == schema().end()) throw ConfigError(section + ": unknown section");
    if (!body.data().empty() && body.empty()) throw ConfigError(section + ": key outside any section");
    for (const auto& [key, value] : body) {
      if (!it->second.count(key)) throw ConfigError(section + "." + key + ": unknown key");
    }
  }

  const Reader r(tree);
  RunConfig c;
  c.market = {r.number("market", "s"), r.number("market", "kappa"), r.number("market", "vartheta"),
              r.number("market", "T")};
  c.friction = {r.number("friction", "delta"), r.number("friction", "mu")};
  try {
    c.payoff.kind = parse_payoff_kind(r.required("payoff", "kind"));
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("payoff.kind: ") + e.what());
  }
  c.payoff.strike = r.number("payoff", "strike");
  c.payoff.penalty = r.number("payoff", "penalty");
  c.position = {r.number("position", "z"), r.number("position", "y")};

  r.integer("solver", "n", c.solver.n);
  r.integer("solver", "z_steps", c.solver.grid.z_steps);
  r.integer("solver", "y_steps", c.solver.grid.y_steps);
  r.number("solver", "y_max_cap", c.solver.grid.y_max_cap);
  r.number("solver", "z_max_factor", c.solver.grid.z_max_factor);
  r.number("solver", "z_max", c.solver.grid.z_max);

  r.integer("sim", "paths", c.sim.paths);
  if (auto v = r.raw("sim", "seed")) {
    const std::string t = *v;
    std::uint64_t seed = 0;
    const auto res = std::from_chars(t.data(), t.data() + t.size(), seed);
    if (t.empty() || res.ec != std::errc() || res.ptr != t.data() + t.size())
      throw ConfigError("sim.seed: not an unsigned 64-bit integer: '" + t + "'");
    c.sim.seed = seed;
  }
  r.integer("sim", "fine_steps", c.sim.fine_steps);
  r.number("sim", "horizon_factor", c.sim.horizon_factor);
  if (auto v = r.raw("sim", "thresholds")) {
    c.sim.thresholds = Reader::list<double>("sim.thresholds", *v, Reader::to_double);
  }

  if (auto v = r.raw("experiment", "n_list")) {
    c.experiment.n_list = Reader::list<int>("experiment.n_list", *v, Reader::to_int);
  }
  r.number("experiment", "z_points_per_sqrt_n", c.experiment.z_points_per_sqrt_n);
  r.integer("experiment", "z_points_cap", c.experiment.z_points_cap);

  if (auto v = r.raw("output", "surface")) {
    if (*v == "all") {
      c.output.full_surface = true;
    } else if (*v == "root") {
      c.output.full_surface = false;
    } else {
      throw ConfigError("output.surface: expected 'all' or 'root', got '" + *v + "'");
    }
  }

  validate(c);
  return c;
}

RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw ConfigError("cannot read config file " + path.string());
  std::ostringstream ss;
  ss << f.rdbuf();
  return parse_config(ss.str());
}

std::string write_config(const RunConfig& c) {
  auto d = [](double v) { return format_double(v); };
  std::ostringstream o;
  o << "[market]\ns = " << d(c.market.s) << "\nkappa = " << d(c.market.kappa) << "\nvartheta = "
    << d(c.market.vartheta) << "\nT = " << d(c.market.T) << "\n\n";
  o << "[friction]\ndelta = " << d(c.friction.delta) << "\nmu = " << d(c.friction.mu) << "\n\n";
  o << "[payoff]\nkind = " << to_string(c.payoff.kind) << "\nstrike = " << d(c.payoff.strike)
    << "\npenalty = " << d(c.payoff.penalty) << "\n\n";
  o << "[position]\nz = " << d(c.position.z) << "\ny = " << d(c.position.y) << "\n\n";
  const GridSettings& g = c.solver.grid;
  o << "[solver]\nn = " << c.solver.n << "\nz_steps = " << g.z_steps << "\ny_steps = " << g.y_steps
    << "\ny_max_cap = " << d(g.y_max_cap) << "\nz_max_factor = " << d(g.z_max_factor) << "\nz_max = " << d(g.z_max)
    << "\n\n";
  o << "[sim]\npaths = " << c.sim.paths << "\nseed = " << c.sim.seed << "\nfine_steps = " << c.sim.fine_steps
    << "\nhorizon_factor = " << d(c.sim.horizon_factor) << "\nthresholds = ";
  for (std::size_t i = 0; i < c.sim.thresholds.size(); ++i) o << (i ? ", " : "") << d(c.sim.thresholds[i]);
  o << "\n\n[experiment]\nn_list = ";
  for (std::size_t i = 0; i < c.experiment.n_list.size(); ++i) o << (i ? ", " : "") << c.experiment.n_list[i];
  o << "\nz_points_per_sqrt_n = " << d(c.experiment.z_points_per_sqrt_n)
    << "\nz_points_cap = " << c.experiment.z_points_cap << "\n\n";
  o << "[output]\nsurface = " << (c.output.full_surface ? "all" : "root") << "\n";
  return o.str();
}

}  // namespace gamehedge
