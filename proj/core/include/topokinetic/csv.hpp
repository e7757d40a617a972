#pragma once

#include <cstdint>
#include <ostream>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "topokinetic/bernstein.hpp"
#include "topokinetic/compare.hpp"
#include "topokinetic/kinetic.hpp"
#include "topokinetic/particles.hpp"

namespace topokinetic {

/// Shortest decimal text that parses back to the same double ("nan", "inf",
/// "-inf" for non-finite values).
std::string format_number(double value);

/// Comma-separated rows with a header line, '.' decimals and LF endings.
class CsvWriter {
 public:
  using Cell = std::variant<double, std::int64_t, std::uint64_t, std::string_view>;

  CsvWriter(std::ostream& out, const std::vector<std::string>& header);
  void row(std::initializer_list<Cell> cells);
  void row(std::span<const Cell> cells);

 private:
  std::ostream& out_;
  std::size_t columns_;
};

/// `t, particle_id, x, v` in 1D and `t, particle_id, x1, x2, v1, v2` in 2D.
void write_trajectory(std::ostream& out, const RunResult& result);
/// `t, variance, distinct_velocities`.
void write_diagnostics(std::ostream& out, const DiagnosticsSeries& series);
/// `t, x, rho` with x the cell centre.
void write_density(std::ostream& out, const KineticSolution& solution);
/// `t, v, g`.
void write_velocity_marginal(std::ostream& out, const KineticSolution& solution);
/// `t, x, v, f` for every stored state.
void write_phase_space(std::ostream& out, const KineticSolution& solution);
/// `check, kernel, p_or_x, size, lhs, leading, corrected, residual_leading, residual_corrected`.
void write_expansion_reports(std::ostream& out, std::span<const ExpansionReport> reports);
/// `N, t, d_rho, d_rho_stderr, d_vel, d_vel_stderr, chaos_metric`.
void write_convergence(std::ostream& out, const ConvergenceReport& report);

}  // namespace topokinetic
