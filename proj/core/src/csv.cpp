#include "topokinetic/csv.hpp"

#include <array>
#include <charconv>
#include <cmath>

#include "topokinetic/errors.hpp"

namespace topokinetic {

std::string format_number(double value) {
  if (std::isnan(value)) return "nan";
  if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
  std::array<char, 32> buf{};
  const auto res = std::to_chars(buf.data(), buf.data() + buf.size(), value);
  return std::string(buf.data(), res.ptr);
}

CsvWriter::CsvWriter(std::ostream& out, const std::vector<std::string>& header)
    : out_(out), columns_(header.size()) {
  for (std::size_t i = 0; i < header.size(); ++i) {
    if (i > 0) out_ << ',';
    out_ << header[i];
  }
  out_ << '\n';
}

void CsvWriter::row(std::initializer_list<Cell> cells) {
  row(std::span<const Cell>(cells.begin(), cells.size()));
}

void CsvWriter::row(std::span<const Cell> cells) {
  if (cells.size() != columns_) throw DomainError("csv row has the wrong number of cells");
  bool first = true;
  for (const auto& cell : cells) {
    if (!first) out_ << ',';
    first = false;
    std::visit(
        [this](const auto& v) {
          using T = std::decay_t<decltype(v)>;
          if constexpr (std::is_same_v<T, double>) {
            out_ << format_number(v);
          } else {
            out_ << v;
          }
        },
        cell);
  }
  out_ << '\n';
}

void write_trajectory(std::ostream& out, const RunResult& result) {
  const bool planar = result.dim == 2;
  CsvWriter csv(out, planar ? std::vector<std::string>{"t", "particle_id", "x1", "x2", "v1", "v2"}
                            : std::vector<std::string>{"t", "particle_id", "x", "v"});
  for (const auto& snap : result.snapshots) {
    const std::size_t n = snap.x.size() / static_cast<std::size_t>(result.dim);
    for (std::size_t i = 0; i < n; ++i) {
      const auto id = static_cast<std::uint64_t>(i);
      if (planar) {
        csv.row({snap.t, id, snap.x[2 * i], snap.x[2 * i + 1], snap.v[2 * i], snap.v[2 * i + 1]});
      } else {
        csv.row({snap.t, id, snap.x[i], snap.v[i]});
      }
    }
  }
}

void write_diagnostics(std::ostream& out, const DiagnosticsSeries& series) {
  CsvWriter csv(out, {"t", "variance", "distinct_velocities"});
  for (std::size_t k = 0; k < series.times.size(); ++k) {
    csv.row({series.times[k], series.velocity_variance[k],
             static_cast<std::uint64_t>(series.distinct_velocities[k])});
  }
}

void write_density(std::ostream& out, const KineticSolution& solution) {
  CsvWriter csv(out, {"t", "x", "rho"});
  const KineticState& geometry = solution.final_state;
  for (std::size_t k = 0; k < solution.times.size(); ++k) {
    for (std::size_t m = 0; m < geometry.cells; ++m) {
      csv.row({solution.times[k], geometry.cell_center(m), solution.density[k][m]});
    }
  }
}

void write_velocity_marginal(std::ostream& out, const KineticSolution& solution) {
  CsvWriter csv(out, {"t", "v", "g"});
  const auto& velocities = solution.final_state.velocities;
  for (std::size_t k = 0; k < solution.times.size(); ++k) {
    for (std::size_t a = 0; a < velocities.size(); ++a) {
      csv.row({solution.times[k], velocities[a], solution.velocity_marginal[k][a]});
    }
  }
}

void write_phase_space(std::ostream& out, const KineticSolution& solution) {
  CsvWriter csv(out, {"t", "x", "v", "f"});
  for (const auto& state : solution.states) {
    for (std::size_t m = 0; m < state.cells; ++m) {
      for (std::size_t a = 0; a < state.classes(); ++a) {
        csv.row({state.t, state.cell_center(m), state.velocities[a], state.at(m, a)});
      }
    }
  }
}

void write_expansion_reports(std::ostream& out, std::span<const ExpansionReport> reports) {
  CsvWriter csv(out, {"check", "kernel", "p_or_x", "size", "lhs", "leading", "corrected",
                      "residual_leading", "residual_corrected"});
  for (const auto& r : reports) {
    csv.row({std::string_view(r.check), std::string_view(r.subject), r.point,
             static_cast<std::uint64_t>(r.size), r.lhs, r.leading, r.corrected,
             r.residual_leading, r.residual_corrected});
  }
}

void write_convergence(std::ostream& out, const ConvergenceReport& report) {
  CsvWriter csv(out, {"N", "t", "d_rho", "d_rho_stderr", "d_vel", "d_vel_stderr", "chaos_metric"});
  for (const auto& row : report.rows) {
    csv.row({static_cast<std::uint64_t>(row.n), row.t, row.d_rho, row.d_rho_stderr, row.d_vel,
             row.d_vel_stderr, row.chaos_metric});
  }
}

}  // namespace topokinetic
