#pragma once

#include <filesystem>
#include <ostream>
#include <span>
#include <string>

#include "gamehedge/experiments.hpp"
#include "gamehedge/lift.hpp"
#include "gamehedge/solver.hpp"

namespace gamehedge {

/// `%.17g`-style: 17 significant digits, round-trip exact; `nan`, `inf`, `-inf`.
std::string format_double(double v);

/// `k,node,z,y,value,action,beta` for every stored layer (only k = 0 when
/// root_only). beta is the trade size of Trade rows and 0 otherwise.
void write_surface_csv(std::ostream& out, const Solution& solution, bool root_only = false);

/// Root layer with the buyer flag: `k,node,z,y,value,action,beta,buyer_flag`.
void write_policy_csv(std::ostream& out, const Solution& solution);

/// `n,risk,diff_prev,wall_ms`; wall_ms is written as 0 unless with_timing, so
/// that repeated runs are byte-identical.
void write_convergence_csv(std::ostream& out, std::span<const ConvergenceRow> rows, bool with_timing);

/// `status,slope,intercept,points`.
void write_rate_fit_csv(std::ostream& out, const RateFit& fit);

/// `strategy,paths,mean_shortfall,stderr,violations,value_match_error,incomplete`.
void write_sim_csv(std::ostream& out, const SimReport& report);

/// `path,k,time,grid_index,sign,price,lattice_price,binomial_value,lifted_value,shares,action`.
void write_trace_csv(std::ostream& out, const SimReport& report);

/// `path,value_at_T,value_at_last_passage,cancelled,cancel_time`.
void write_path_summary_csv(std::ostream& out, const SimReport& report);

/// Opens `path` in binary mode (LF endings everywhere); throws std::runtime_error on failure.
void write_file(const std::filesystem::path& path, const std::string& contents);

}  // namespace gamehedge
