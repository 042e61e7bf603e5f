#include "gamehedge/csv.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <stdexcept>

namespace gamehedge {

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general, 17);
  return std::string(buf, res.ptr);
}

namespace {

std::string_view rate_status(RateFit::Status s) {
  switch (s) {
    case RateFit::Status::Fitted:
      return "fitted";
    case RateFit::Status::ExactConvergence:
      return "exact_convergence";
    case RateFit::Status::Insufficient:
      return "insufficient";
  }
  return "unknown";
}

void surface_rows(std::ostream& out, const Solution& solution, int k, bool with_flag) {
  const RiskSurface& surface = solution.surface;
  const SolverGrid& grid = surface.grid();
  const auto& zs = grid.z();
  const auto& ys = grid.y();
  const auto nodes = surface.layout().tree().count(k);
  for (std::size_t node = 0; node < nodes; ++node) {
    for (int yj = 0; yj < grid.ny(); ++yj) {
      for (int zi = 0; zi < grid.nz(); ++zi) {
        const Decision& d = solution.policy.at(k, node, zi, yj);
        const double beta = d.action == Action::Trade
                                ? ys[static_cast<std::size_t>(d.target)] - ys[static_cast<std::size_t>(yj)]
                                : 0.0;
        out << k << ',' << node << ',' << format_double(zs[static_cast<std::size_t>(zi)]) << ','
            << format_double(ys[static_cast<std::size_t>(yj)]) << ','
            << format_double(surface.value(k, node, zi, yj)) << ',' << to_string(d.action) << ','
            << format_double(beta);
        if (with_flag) out << ',' << (d.buyer_stop ? 1 : 0);
        out << '\n';
      }
    }
  }
}

}  // namespace

void write_surface_csv(std::ostream& out, const Solution& solution, bool root_only) {
  out << "k,node,z,y,value,action,beta\n";
  const int last = root_only ? 0 : solution.surface.steps();
  for (int k = 0; k <= last; ++k) {
    if (!solution.surface.has_layer(k) || !solution.policy.has_layer(k)) continue;
    surface_rows(out, solution, k, false);
  }
}

void write_policy_csv(std::ostream& out, const Solution& solution) {
  out << "k,node,z,y,value,action,beta,buyer_flag\n";
  surface_rows(out, solution, 0, true);
}

void write_convergence_csv(std::ostream& out, std::span<const ConvergenceRow> rows, bool with_timing) {
  out << "n,risk,diff_prev,wall_ms\n";
  for (const auto& r : rows) {
    out << r.n << ',' << format_double(r.risk) << ',' << format_double(r.diff_prev) << ','
        << format_double(with_timing ? r.wall_ms : 0.0) << '\n';
  }
}

void write_rate_fit_csv(std::ostream& out, const RateFit& fit) {
  out << "status,slope,intercept,points\n";
  out << rate_status(fit.status) << ',' << format_double(fit.slope) << ',' << format_double(fit.intercept)
      << ',' << fit.points << '\n';
}

void write_sim_csv(std::ostream& out, const SimReport& report) {
  out << "strategy,paths,mean_shortfall,stderr,violations,value_match_error,incomplete\n";
  for (const auto& s : report.strategies) {
    out << s.strategy.name() << ',' << report.paths << ',' << format_double(s.mean_shortfall) << ','
        << format_double(s.stderr_shortfall) << ',' << report.admissibility_violations << ','
        << format_double(report.value_match_error) << ',' << report.incomplete_embeddings << '\n';
  }
}

void write_trace_csv(std::ostream& out, const SimReport& report) {
  out << "path,k,time,grid_index,sign,price,lattice_price,binomial_value,lifted_value,shares,action\n";
  for (const auto& t : report.trace) {
    out << t.path << ',' << t.k << ',' << format_double(t.time) << ',' << t.grid_index << ',' << t.sign << ','
        << format_double(t.price) << ',' << format_double(t.lattice_price) << ','
        << format_double(t.binomial_value) << ',' << format_double(t.lifted_value) << ','
        << format_double(t.shares) << ',' << to_string(t.action) << '\n';
  }
}

void write_path_summary_csv(std::ostream& out, const SimReport& report) {
  out << "path,value_at_T,value_at_last_passage,cancelled,cancel_time\n";
  for (const auto& s : report.summaries) {
    out << s.path << ',' << format_double(s.value_at_T) << ',' << format_double(s.value_at_last_passage) << ','
        << (s.cancelled ? 1 : 0) << ',' << format_double(s.cancel_time) << '\n';
  }
}

void write_file(const std::filesystem::path& path, const std::string& contents) {
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw std::runtime_error("cannot open " + path.string() + " for writing");
  f << contents;
  if (!f) throw std::runtime_error("failed writing " + path.string());
}

}  // namespace gamehedge
