#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "topokinetic/kernel.hpp"
#include "topokinetic/kinetic.hpp"
#include "topokinetic/marginal.hpp"

namespace topokinetic {

struct MarginalDistance {
  double d_rho = 0.0;  // sum_m |rho_hat_m - rho_m| dx
  double d_vel = 0.0;  // sum_a |g_hat_a - g_a|
};

/// Throws GridMismatch unless the marginal grid is [0, L) with the state's
/// cell count and velocity set.
MarginalDistance marginal_distance(const EmpiricalMarginal& marginal, const KineticState& state);

struct DistanceEstimate {
  MarginalDistance value;
  double d_rho_stderr = 0.0;
  double d_vel_stderr = 0.0;
};

/// Distances with bootstrap standard errors obtained by resampling runs.
DistanceEstimate distance_with_error(const EmpiricalMarginal& marginal, const KineticState& state,
                                     std::size_t resamples, std::uint64_t seed);

/// Cell averages over groups of `factor` adjacent cells.
KineticState coarsen_state(const KineticState& state, std::size_t factor);

/// Merges the marginal onto `cell_groups` x `class_groups` coarse bins made of
/// adjacent cells and adjacent velocity classes; both must divide evenly.
EmpiricalMarginal regroup(const EmpiricalMarginal& marginal, std::size_t cell_groups,
                          std::size_t class_groups);

/// `runs` independent i.i.d. samples of `particles` draws from f.
EmpiricalMarginal sample_marginal(const KineticState& state, std::size_t particles,
                                  std::size_t runs, std::uint64_t seed);

/// L1 distance between the exchangeable two-particle marginal (all ordered
/// pairs i != j, pooled over runs) and the product of the one-particle
/// marginals, on the bins of `marginal`. Needs >= 2 particles and >= 2 runs.
double chaos_metric(const EmpiricalMarginal& marginal);

struct ChaosEstimate {
  double metric = 0.0;
  double metric_stderr = 0.0;  // bootstrap over runs
  double floor = 0.0;          // mean metric of independent multinomial ensembles
  double floor_stderr = 0.0;   // spread of that floor
};

ChaosEstimate chaos_estimate(const EmpiricalMarginal& marginal, std::size_t resamples,
                             std::uint64_t seed);

struct CompareSetup {
  KineticState initial;  // also the particles' initial law
  RankKernel kernel = RankKernel::constant();
  std::vector<std::size_t> ladder;
  std::size_t runs = 200;
  std::vector<double> times{1.0};
  std::size_t comparison_cells = 0;  // 0: kinetic cell count; otherwise must divide it
  std::size_t chaos_cells = 4;
  std::size_t chaos_classes = 2;
  SolveOptions solve;  // dt and step options; t_end and sampling are ignored
  std::uint64_t seed = 0;
  std::size_t resamples = 200;
  unsigned threads = 0;

  /// Throws ConfigError (fewer than 3 ladder points, bad times) or GridMismatch.
  void validate() const;
};

struct ComparisonRow {
  std::size_t n = 0;
  double t = 0.0;
  double d_rho = 0.0;
  double d_rho_stderr = 0.0;
  double d_vel = 0.0;
  double d_vel_stderr = 0.0;
  double chaos_metric = 0.0;
  double chaos_stderr = 0.0;
};

struct ConvergenceReport {
  std::size_t runs = 0;
  std::vector<ComparisonRow> rows;  // ordered by t, then by N

  [[nodiscard]] std::vector<ComparisonRow> at_time(double t) const;
};

ConvergenceReport run_comparison(const CompareSetup& setup);

/// True if every consecutive drop exceeds the standard error of the difference.
bool decreasing_beyond_error(std::span<const double> values, std::span<const double> errors);

struct ConvergenceVerdict {
  bool density = false;
  bool velocity = false;
  bool chaos = false;
  [[nodiscard]] bool passed() const { return density && velocity && chaos; }
};

/// Density and velocity distances must decrease beyond error bars and the
/// chaos metric must decrease, at every reported time.
ConvergenceVerdict assess(const ConvergenceReport& report);

}  // namespace topokinetic
