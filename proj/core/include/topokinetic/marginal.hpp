#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "topokinetic/particles.hpp"

namespace topokinetic {

/// Histogram grid for one-particle marginals of 1D runs: uniform cells on
/// [x_lo, x_hi) times a finite set of velocity classes. A particle is
/// assigned to the class nearest to its velocity.
struct MarginalGrid {
  double x_lo = 0.0;
  double x_hi = 1.0;
  std::size_t cells = 1;
  std::vector<double> velocities{0.0};

  [[nodiscard]] std::size_t classes() const { return velocities.size(); }
  [[nodiscard]] std::size_t bins() const { return cells * velocities.size(); }
  [[nodiscard]] double dx() const { return (x_hi - x_lo) / static_cast<double>(cells); }

  /// Row-major bin of (x, v), or bins() if x lies outside the grid.
  [[nodiscard]] std::size_t bin_of(double x, double v) const;
};

/// Monte Carlo estimate of the first marginal at one time.
///
/// `mean` is a density in x: mean[m * classes + a] * dx is the expected
/// fraction of particles in cell m with class a. `counts` keeps the raw
/// per-run histograms so that resampling and pair statistics can be formed
/// later.
struct EmpiricalMarginal {
  MarginalGrid grid;
  double t = 0.0;
  std::size_t particles = 0;
  std::vector<std::vector<std::uint32_t>> counts;  // [run][bin]
  std::vector<double> mean;
  std::vector<double> standard_error;

  [[nodiscard]] std::size_t runs() const { return counts.size(); }
  /// rho_m = sum_a mean[m][a].
  [[nodiscard]] std::vector<double> density() const;
  /// g_a = sum_m mean[m][a] dx.
  [[nodiscard]] std::vector<double> velocity_marginal() const;
};

/// Rebuilds mean and standard errors from the per-run counts.
void summarize(EmpiricalMarginal& marginal);

/// Merges groups of `factor` adjacent cells; cells must be divisible by factor.
EmpiricalMarginal coarsen(const EmpiricalMarginal& marginal, std::size_t factor);

/// Runs `runs` independent simulations (run r uses stream (seed, r)) and
/// histograms every particle at each requested time. Results do not depend
/// on the thread count. Only 1D metrics are supported.
std::vector<EmpiricalMarginal> ensemble_marginal(const SimConfig& config, std::size_t runs,
                                                 const MarginalGrid& grid,
                                                 std::span<const double> times,
                                                 unsigned threads = 0);

}  // namespace topokinetic
