#include "topokinetic/compare.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <string>

#include "topokinetic/errors.hpp"
#include "topokinetic/random.hpp"
#include "topokinetic/stats.hpp"

namespace topokinetic {

namespace {

void check_grid(const MarginalGrid& grid, const KineticState& state) {
  if (grid.cells != state.cells) {
    throw GridMismatch("marginal has " + std::to_string(grid.cells) + " cells, kinetic state " +
                       std::to_string(state.cells));
  }
  if (grid.classes() != state.classes()) throw GridMismatch("velocity sets differ in size");
  for (std::size_t a = 0; a < grid.classes(); ++a) {
    if (std::abs(grid.velocities[a] - state.velocities[a]) > 1e-12) {
      throw GridMismatch("velocity sets differ");
    }
  }
  if (std::abs(grid.x_lo) > 1e-12 || std::abs(grid.x_hi - state.length) > 1e-12 * state.length) {
    throw GridMismatch("marginal grid does not cover the periodic domain");
  }
}

// Distances of a density given as per-bin mean values (same layout as f).
MarginalDistance distance_of(std::span<const double> mean, const KineticState& state) {
  const std::size_t nv = state.classes();
  const double dx = state.dx();
  MarginalDistance d;
  std::vector<double> g_hat(nv, 0.0);
  std::vector<double> g(nv, 0.0);
  for (std::size_t m = 0; m < state.cells; ++m) {
    double rho_hat = 0.0;
    double rho = 0.0;
    for (std::size_t a = 0; a < nv; ++a) {
      rho_hat += mean[m * nv + a];
      rho += state.at(m, a);
      g_hat[a] += mean[m * nv + a] * dx;
      g[a] += state.at(m, a) * dx;
    }
    d.d_rho += std::abs(rho_hat - rho) * dx;
  }
  for (std::size_t a = 0; a < nv; ++a) d.d_vel += std::abs(g_hat[a] - g[a]);
  return d;
}

std::vector<std::size_t> resample_indices(Engine& engine, std::size_t n) {
  std::vector<std::size_t> idx(n);
  for (auto& i : idx) {
    i = std::min(n - 1, static_cast<std::size_t>(uniform01(engine) * static_cast<double>(n)));
  }
  return idx;
}

double chaos_from_counts(const std::vector<const std::vector<std::uint32_t>*>& runs,
                         std::size_t bins, std::size_t particles) {
  const double n = static_cast<double>(particles);
  const double pairs = n * (n - 1.0);
  std::vector<double> one(bins, 0.0);
  std::vector<double> two(bins * bins, 0.0);
  for (const auto* run : runs) {
    const auto& c = *run;
    for (std::size_t b = 0; b < bins; ++b) {
      const double nb = c[b];
      if (nb == 0.0) continue;
      one[b] += nb / n;
      for (std::size_t e = 0; e < bins; ++e) two[b * bins + e] += nb * c[e] / pairs;
      two[b * bins + b] -= nb / pairs;
    }
  }
  const double r = static_cast<double>(runs.size());
  double metric = 0.0;
  for (std::size_t b = 0; b < bins; ++b) {
    for (std::size_t e = 0; e < bins; ++e) {
      metric += std::abs(two[b * bins + e] / r - (one[b] / r) * (one[e] / r));
    }
  }
  return metric;
}

void check_chaos_input(const EmpiricalMarginal& marginal) {
  if (marginal.particles < 2) throw DomainError("chaos metric needs at least two particles");
  if (marginal.runs() < 2) throw DomainError("chaos metric needs at least two runs");
}

}  // namespace

MarginalDistance marginal_distance(const EmpiricalMarginal& marginal, const KineticState& state) {
  check_grid(marginal.grid, state);
  return distance_of(marginal.mean, state);
}

DistanceEstimate distance_with_error(const EmpiricalMarginal& marginal, const KineticState& state,
                                     std::size_t resamples, std::uint64_t seed) {
  DistanceEstimate out;
  out.value = marginal_distance(marginal, state);
  const std::size_t runs = marginal.runs();
  if (resamples < 2 || runs < 2) return out;

  Engine engine = stream_engine(seed, 0);
  const std::size_t bins = marginal.grid.bins();
  const double scale =
      1.0 / (static_cast<double>(runs * marginal.particles) * marginal.grid.dx());
  std::vector<double> rho_d;
  std::vector<double> vel_d;
  std::vector<double> mean(bins);
  for (std::size_t b = 0; b < resamples; ++b) {
    std::fill(mean.begin(), mean.end(), 0.0);
    for (std::size_t r : resample_indices(engine, runs)) {
      const auto& c = marginal.counts[r];
      for (std::size_t k = 0; k < bins; ++k) mean[k] += c[k];
    }
    for (double& v : mean) v *= scale;
    const MarginalDistance d = distance_of(mean, state);
    rho_d.push_back(d.d_rho);
    vel_d.push_back(d.d_vel);
  }
  out.d_rho_stderr = sample_stddev(rho_d);
  out.d_vel_stderr = sample_stddev(vel_d);
  return out;
}

KineticState coarsen_state(const KineticState& state, std::size_t factor) {
  if (factor == 0 || state.cells % factor != 0) {
    throw GridMismatch("coarsening factor must divide the cell count");
  }
  KineticState out;
  out.length = state.length;
  out.cells = state.cells / factor;
  out.velocities = state.velocities;
  out.t = state.t;
  out.f.assign(out.cells * out.classes(), 0.0);
  for (std::size_t m = 0; m < state.cells; ++m) {
    for (std::size_t a = 0; a < state.classes(); ++a) {
      out.at(m / factor, a) += state.at(m, a) / static_cast<double>(factor);
    }
  }
  return out;
}

EmpiricalMarginal regroup(const EmpiricalMarginal& marginal, std::size_t cell_groups,
                          std::size_t class_groups) {
  const MarginalGrid& grid = marginal.grid;
  if (cell_groups == 0 || class_groups == 0 || grid.cells % cell_groups != 0 ||
      grid.classes() % class_groups != 0) {
    throw GridMismatch("coarse statistic grid must divide the marginal grid");
  }
  const std::size_t cf = grid.cells / cell_groups;
  const std::size_t vf = grid.classes() / class_groups;
  EmpiricalMarginal out;
  out.grid.x_lo = grid.x_lo;
  out.grid.x_hi = grid.x_hi;
  out.grid.cells = cell_groups;
  out.grid.velocities.assign(class_groups, 0.0);
  for (std::size_t a = 0; a < grid.classes(); ++a) {
    out.grid.velocities[a / vf] += grid.velocities[a] / static_cast<double>(vf);
  }
  out.t = marginal.t;
  out.particles = marginal.particles;
  const std::size_t nv = grid.classes();
  for (const auto& run : marginal.counts) {
    std::vector<std::uint32_t> merged(out.grid.bins(), 0);
    for (std::size_t m = 0; m < grid.cells; ++m) {
      for (std::size_t a = 0; a < nv; ++a) {
        merged[(m / cf) * class_groups + a / vf] += run[m * nv + a];
      }
    }
    out.counts.push_back(std::move(merged));
  }
  summarize(out);
  return out;
}

EmpiricalMarginal sample_marginal(const KineticState& state, std::size_t particles,
                                  std::size_t runs, std::uint64_t seed) {
  EmpiricalMarginal out;
  out.grid.x_lo = 0.0;
  out.grid.x_hi = state.length;
  out.grid.cells = state.cells;
  out.grid.velocities = state.velocities;
  out.t = state.t;
  out.particles = particles;
  std::vector<double> cdf(state.f.size());
  double running = 0.0;
  for (std::size_t k = 0; k < cdf.size(); ++k) {
    running += state.f[k];
    cdf[k] = running;
  }
  if (!(running > 0.0)) throw EmptyDensity("cannot sample a state without mass");
  for (std::size_t r = 0; r < runs; ++r) {
    Engine engine = stream_engine(seed, r);
    std::vector<std::uint32_t> counts(cdf.size(), 0);
    for (std::size_t i = 0; i < particles; ++i) {
      auto it = std::upper_bound(cdf.begin(), cdf.end(), uniform01(engine) * running);
      if (it == cdf.end()) --it;
      ++counts[static_cast<std::size_t>(it - cdf.begin())];
    }
    out.counts.push_back(std::move(counts));
  }
  summarize(out);
  return out;
}

double chaos_metric(const EmpiricalMarginal& marginal) {
  check_chaos_input(marginal);
  std::vector<const std::vector<std::uint32_t>*> runs;
  for (const auto& c : marginal.counts) runs.push_back(&c);
  return chaos_from_counts(runs, marginal.grid.bins(), marginal.particles);
}

ChaosEstimate chaos_estimate(const EmpiricalMarginal& marginal, std::size_t resamples,
                             std::uint64_t seed) {
  check_chaos_input(marginal);
  ChaosEstimate out;
  out.metric = chaos_metric(marginal);
  if (resamples < 2) return out;

  const std::size_t runs = marginal.runs();
  const std::size_t bins = marginal.grid.bins();
  Engine engine = stream_engine(seed, 1);
  std::vector<double> boot;
  for (std::size_t b = 0; b < resamples; ++b) {
    std::vector<const std::vector<std::uint32_t>*> picked;
    for (std::size_t r : resample_indices(engine, runs)) picked.push_back(&marginal.counts[r]);
    boot.push_back(chaos_from_counts(picked, bins, marginal.particles));
  }
  out.metric_stderr = sample_stddev(boot);

  // Floor: ensembles of the same size in which particles are independent draws
  // from the pooled one-particle law.
  std::vector<double> p(bins, 0.0);
  for (const auto& c : marginal.counts) {
    for (std::size_t k = 0; k < bins; ++k) p[k] += c[k];
  }
  const double total = static_cast<double>(runs * marginal.particles);
  for (double& v : p) v /= total;
  std::vector<double> floors;
  std::vector<std::vector<std::uint32_t>> synthetic(runs, std::vector<std::uint32_t>(bins));
  for (std::size_t b = 0; b < resamples; ++b) {
    for (auto& counts : synthetic) {
      auto left = static_cast<std::int64_t>(marginal.particles);
      double mass_left = 1.0;
      for (std::size_t k = 0; k < bins; ++k) {
        std::int64_t draw = 0;
        if (k + 1 == bins) {
          draw = left;
        } else if (left > 0 && p[k] > 0.0) {
          const double q = std::clamp(p[k] / mass_left, 0.0, 1.0);
          draw = std::binomial_distribution<std::int64_t>(left, q)(engine);
        }
        counts[k] = static_cast<std::uint32_t>(draw);
        left -= draw;
        mass_left -= p[k];
      }
    }
    std::vector<const std::vector<std::uint32_t>*> ptrs;
    for (const auto& c : synthetic) ptrs.push_back(&c);
    floors.push_back(chaos_from_counts(ptrs, bins, marginal.particles));
  }
  out.floor = mean(floors);
  out.floor_stderr = sample_stddev(floors);
  return out;
}

void CompareSetup::validate() const {
  if (ladder.size() < 3) throw ConfigError("the N ladder needs at least 3 points");
  for (std::size_t k = 0; k < ladder.size(); ++k) {
    if (ladder[k] < 2) throw ConfigError("every N must be at least 2");
    if (k > 0 && ladder[k] <= ladder[k - 1]) throw ConfigError("the N ladder must increase");
  }
  if (runs < 2) throw ConfigError("at least 2 runs per N are required");
  if (times.empty()) throw ConfigError("no comparison times");
  for (std::size_t k = 0; k < times.size(); ++k) {
    if (!(times[k] >= 0.0)) throw ConfigError("comparison times must be >= 0");
    if (k > 0 && times[k] <= times[k - 1]) throw ConfigError("comparison times must increase");
  }
  if (initial.cells == 0 || initial.classes() == 0) throw ConfigError("empty kinetic grid");
  const std::size_t cells = comparison_cells == 0 ? initial.cells : comparison_cells;
  if (initial.cells % cells != 0) {
    throw GridMismatch("comparison cells must divide the kinetic cell count");
  }
  if (chaos_cells == 0 || chaos_classes == 0 || cells % chaos_cells != 0 ||
      initial.classes() % chaos_classes != 0) {
    throw GridMismatch("chaos statistic grid must divide the comparison grid");
  }
  if (solve.dt > 1.0) throw StepTooLarge("kinetic step requires dt <= 1");
  if (!(solve.dt > 0.0)) throw ConfigError("dt must be positive");
}

std::vector<ComparisonRow> ConvergenceReport::at_time(double t) const {
  std::vector<ComparisonRow> out;
  for (const auto& row : rows) {
    if (std::abs(row.t - t) <= 1e-12 * std::max(1.0, std::abs(t))) out.push_back(row);
  }
  return out;
}

ConvergenceReport run_comparison(const CompareSetup& setup) {
  setup.validate();
  const std::size_t cells = setup.comparison_cells == 0 ? setup.initial.cells
                                                        : setup.comparison_cells;
  const std::size_t factor = setup.initial.cells / cells;

  std::vector<KineticState> reference;
  KineticState state = setup.initial;
  state.t = 0.0;
  for (double t : setup.times) {
    if (t > state.t) {
      SolveOptions opts = setup.solve;
      opts.t_end = t - state.t;
      opts.sample_interval = opts.t_end;
      opts.keep_states = false;
      KineticState start = state;
      start.t = 0.0;
      state = solve(start, setup.kernel, opts).final_state;
      state.t = t;
    }
    reference.push_back(coarsen_state(state, factor));
  }

  PhaseGrid init;
  init.length = setup.initial.length;
  init.cells = setup.initial.cells;
  init.velocities = setup.initial.velocities;
  init.mass.resize(setup.initial.f.size());
  for (std::size_t k = 0; k < init.mass.size(); ++k) init.mass[k] = setup.initial.f[k] * setup.initial.dx();

  MarginalGrid grid;
  grid.x_lo = 0.0;
  grid.x_hi = setup.initial.length;
  grid.cells = cells;
  grid.velocities = setup.initial.velocities;

  ConvergenceReport report;
  report.runs = setup.runs;
  std::vector<std::vector<ComparisonRow>> by_time(setup.times.size());
  for (std::size_t n : setup.ladder) {
    SimConfig config;
    config.n = n;
    config.kernel = setup.kernel;
    config.metric = Metric::periodic_line(setup.initial.length);
    config.t_end = setup.times.back();
    config.init = init;
    config.seed = mix_seed(setup.seed) ^ mix_seed(n);
    config.sample_interval = std::max(config.t_end, 1e-9);
    config.record_snapshots = false;
    const auto marginals =
        ensemble_marginal(config, setup.runs, grid, setup.times, setup.threads);
    for (std::size_t k = 0; k < setup.times.size(); ++k) {
      const std::uint64_t stat_seed = config.seed + 7919 * (k + 1);
      const DistanceEstimate d =
          distance_with_error(marginals[k], reference[k], setup.resamples, stat_seed);
      const EmpiricalMarginal coarse =
          regroup(marginals[k], setup.chaos_cells, setup.chaos_classes);
      const ChaosEstimate chaos = chaos_estimate(coarse, setup.resamples, stat_seed + 1);
      ComparisonRow row;
      row.n = n;
      row.t = setup.times[k];
      row.d_rho = d.value.d_rho;
      row.d_rho_stderr = d.d_rho_stderr;
      row.d_vel = d.value.d_vel;
      row.d_vel_stderr = d.d_vel_stderr;
      row.chaos_metric = chaos.metric;
      row.chaos_stderr = chaos.metric_stderr;
      by_time[k].push_back(row);
    }
  }
  for (auto& rows : by_time) {
    for (auto& row : rows) report.rows.push_back(row);
  }
  return report;
}

bool decreasing_beyond_error(std::span<const double> values, std::span<const double> errors) {
  if (values.size() != errors.size()) throw DomainError("one error bar per value is required");
  for (std::size_t k = 0; k + 1 < values.size(); ++k) {
    const double drop = values[k] - values[k + 1];
    if (!(drop > std::hypot(errors[k], errors[k + 1]))) return false;
  }
  return true;
}

ConvergenceVerdict assess(const ConvergenceReport& report) {
  ConvergenceVerdict v{true, true, true};
  std::vector<double> times;
  for (const auto& row : report.rows) {
    if (times.empty() || row.t != times.back()) times.push_back(row.t);
  }
  for (double t : times) {
    std::vector<double> rho, rho_se, vel, vel_se, chaos;
    for (const auto& row : report.at_time(t)) {
      rho.push_back(row.d_rho);
      rho_se.push_back(row.d_rho_stderr);
      vel.push_back(row.d_vel);
      vel_se.push_back(row.d_vel_stderr);
      chaos.push_back(row.chaos_metric);
    }
    v.density = v.density && decreasing_beyond_error(rho, rho_se);
    v.velocity = v.velocity && decreasing_beyond_error(vel, vel_se);
    for (std::size_t k = 0; k + 1 < chaos.size(); ++k) {
      if (!(chaos[k + 1] < chaos[k])) v.chaos = false;
    }
  }
  return v;
}

}  // namespace topokinetic
