#include "topokinetic/marginal.hpp"

#include <algorithm>
#include <cmath>

#include "topokinetic/errors.hpp"
#include "topokinetic/parallel.hpp"

namespace topokinetic {

std::size_t MarginalGrid::bin_of(double x, double v) const {
  if (!(x >= x_lo && x < x_hi)) return bins();
  const auto cell =
      std::min(cells - 1, static_cast<std::size_t>(std::floor((x - x_lo) / dx())));
  std::size_t best = 0;
  double best_gap = std::abs(v - velocities[0]);
  for (std::size_t a = 1; a < velocities.size(); ++a) {
    const double gap = std::abs(v - velocities[a]);
    if (gap < best_gap) {
      best = a;
      best_gap = gap;
    }
  }
  return cell * velocities.size() + best;
}

std::vector<double> EmpiricalMarginal::density() const {
  std::vector<double> rho(grid.cells, 0.0);
  const std::size_t nv = grid.classes();
  for (std::size_t m = 0; m < grid.cells; ++m) {
    for (std::size_t a = 0; a < nv; ++a) rho[m] += mean[m * nv + a];
  }
  return rho;
}

std::vector<double> EmpiricalMarginal::velocity_marginal() const {
  const std::size_t nv = grid.classes();
  std::vector<double> g(nv, 0.0);
  for (std::size_t m = 0; m < grid.cells; ++m) {
    for (std::size_t a = 0; a < nv; ++a) g[a] += mean[m * nv + a] * grid.dx();
  }
  return g;
}

void summarize(EmpiricalMarginal& marginal) {
  const std::size_t bins = marginal.grid.bins();
  const std::size_t runs = marginal.runs();
  const double scale = 1.0 / (static_cast<double>(marginal.particles) * marginal.grid.dx());
  marginal.mean.assign(bins, 0.0);
  marginal.standard_error.assign(bins, 0.0);
  if (runs == 0) return;
  for (std::size_t b = 0; b < bins; ++b) {
    double mean = 0.0;
    for (const auto& run : marginal.counts) mean += run[b] * scale;
    mean /= static_cast<double>(runs);
    double ss = 0.0;
    for (const auto& run : marginal.counts) {
      const double d = run[b] * scale - mean;
      ss += d * d;
    }
    marginal.mean[b] = mean;
    marginal.standard_error[b] =
        runs > 1 ? std::sqrt(ss / static_cast<double>(runs - 1) / static_cast<double>(runs)) : 0.0;
  }
}

EmpiricalMarginal coarsen(const EmpiricalMarginal& marginal, std::size_t factor) {
  if (factor == 0 || marginal.grid.cells % factor != 0) {
    throw GridMismatch("coarsening factor must divide the cell count");
  }
  EmpiricalMarginal out;
  out.grid = marginal.grid;
  out.grid.cells = marginal.grid.cells / factor;
  out.t = marginal.t;
  out.particles = marginal.particles;
  const std::size_t nv = marginal.grid.classes();
  out.counts.reserve(marginal.runs());
  for (const auto& run : marginal.counts) {
    std::vector<std::uint32_t> merged(out.grid.bins(), 0);
    for (std::size_t m = 0; m < marginal.grid.cells; ++m) {
      for (std::size_t a = 0; a < nv; ++a) merged[(m / factor) * nv + a] += run[m * nv + a];
    }
    out.counts.push_back(std::move(merged));
  }
  summarize(out);
  return out;
}

std::vector<EmpiricalMarginal> ensemble_marginal(const SimConfig& config, std::size_t runs,
                                                 const MarginalGrid& grid,
                                                 std::span<const double> times, unsigned threads) {
  config.validate();
  if (config.metric.dim() != 1) throw DomainError("ensemble marginals are implemented for 1D runs");
  if (grid.cells == 0 || grid.velocities.empty() || !(grid.x_hi > grid.x_lo)) {
    throw GridMismatch("marginal grid is empty");
  }
  if (!std::is_sorted(times.begin(), times.end())) throw DomainError("times must be sorted");

  // per_run[r][k] is the histogram of run r at times[k]
  std::vector<std::vector<std::vector<std::uint32_t>>> per_run(runs);
  parallel_for(runs, threads, [&](std::size_t r) {
    ParticleSimulation sim(config, r);
    auto& hist = per_run[r];
    hist.assign(times.size(), std::vector<std::uint32_t>(grid.bins(), 0));
    for (std::size_t k = 0; k < times.size(); ++k) {
      sim.advance_to(times[k]);
      const std::vector<double> x = sim.positions_at(times[k]);
      const auto& v = sim.state().v;
      for (std::size_t i = 0; i < x.size(); ++i) {
        const std::size_t b = grid.bin_of(x[i], v[i]);
        if (b < grid.bins()) ++hist[k][b];
      }
    }
  });

  std::vector<EmpiricalMarginal> out(times.size());
  for (std::size_t k = 0; k < times.size(); ++k) {
    out[k].grid = grid;
    out[k].t = times[k];
    out[k].particles = config.n;
    out[k].counts.reserve(runs);
    for (std::size_t r = 0; r < runs; ++r) out[k].counts.push_back(std::move(per_run[r][k]));
    summarize(out[k]);
  }
  return out;
}

}  // namespace topokinetic
