#include "topokinetic/particles.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <sstream>
#include <string>

#include "topokinetic/errors.hpp"
#include "topokinetic/summation.hpp"

namespace topokinetic {

double velocity_variance(const ParticleEnsemble& ensemble) {
  const std::size_t n = ensemble.size();
  if (n == 0) return 0.0;
  if (distinct_velocity_count(ensemble) == 1) return 0.0;
  const auto dim = static_cast<std::size_t>(ensemble.dim);
  double trace = 0.0;
  for (std::size_t c = 0; c < dim; ++c) {
    CompensatedSum sum;
    for (std::size_t i = 0; i < n; ++i) sum += ensemble.v[i * dim + c];
    const double mean = sum.value() / static_cast<double>(n);
    CompensatedSum sq;
    for (std::size_t i = 0; i < n; ++i) {
      const double d = ensemble.v[i * dim + c] - mean;
      sq += d * d;
    }
    trace += sq.value() / static_cast<double>(n);
  }
  return trace;
}

std::size_t distinct_velocity_count(const ParticleEnsemble& ensemble) {
  return VelocityCensus(ensemble).distinct();
}

VelocityCensus::Key VelocityCensus::key(std::span<const double> velocity) {
  Key k{0, 0};
  for (std::size_t c = 0; c < velocity.size() && c < k.size(); ++c) {
    k[c] = std::bit_cast<std::uint64_t>(velocity[c]);
  }
  return k;
}

VelocityCensus::VelocityCensus(const ParticleEnsemble& ensemble) {
  if (ensemble.dim > 2) throw DomainError("velocity census supports dim <= 2");
  for (std::size_t i = 0; i < ensemble.size(); ++i) ++counts_[key(ensemble.velocity(i))];
}

void VelocityCensus::replace(std::span<const double> before, std::span<const double> after) {
  const Key old_key = key(before);
  const Key new_key = key(after);
  if (old_key == new_key) return;
  auto it = counts_.find(old_key);
  if (it != counts_.end() && --it->second == 0) counts_.erase(it);
  ++counts_[new_key];
}

void free_flight(ParticleEnsemble& ensemble, const Metric& metric, double tau) {
  for (std::size_t k = 0; k < ensemble.x.size(); ++k) {
    ensemble.x[k] = metric.wrap(ensemble.x[k] + tau * ensemble.v[k]);
  }
  ensemble.t += tau;
}

CollisionEvent apply_event(ParticleEnsemble& ensemble, const DiscreteKernelTable& table,
                           const Metric& metric, LeaderSelector& selector, double tau,
                           std::size_t follower, double u_rank, SelectionStrategy strategy) {
  free_flight(ensemble, metric, tau);
  const std::size_t leader = selector.select(ensemble.x, metric, table, follower, u_rank, strategy);
  const auto dim = static_cast<std::size_t>(ensemble.dim);
  std::copy_n(ensemble.v.begin() + static_cast<std::ptrdiff_t>(leader * dim), dim,
              ensemble.v.begin() + static_cast<std::ptrdiff_t>(follower * dim));
  return CollisionEvent{ensemble.t, follower, leader};
}

namespace {

std::size_t draw_follower(Engine& engine, std::size_t n) {
  return std::min(n - 1, static_cast<std::size_t>(uniform01(engine) * static_cast<double>(n)));
}

}  // namespace

CollisionEvent step_to_next_event(ParticleEnsemble& ensemble, const DiscreteKernelTable& table,
                                  const Metric& metric, Engine& engine, LeaderSelector& selector,
                                  SelectionStrategy strategy) {
  const std::size_t n = ensemble.size();
  const double tau = exponential(engine, static_cast<double>(n));
  const std::size_t follower = draw_follower(engine, n);
  const double u_rank = uniform01(engine);
  return apply_event(ensemble, table, metric, selector, tau, follower, u_rank, strategy);
}

void SimConfig::validate() const {
  auto fail = [](const std::string& what) { throw ConfigError(what); };
  if (n < 2) fail("N must be at least 2");
  if (!(t_end >= 0.0) || !std::isfinite(t_end)) fail("t_end must be finite and >= 0");
  if (!(sample_interval > 0.0)) fail("sample_interval must be > 0");
  if (const auto* box = std::get_if<UniformBox>(&init)) {
    if (!(box->x_lo <= box->x_hi) || !(box->v_lo <= box->v_hi)) fail("initial box has lo > hi");
    if (metric.kind() == MetricKind::PeriodicLine &&
        (box->x_lo < 0.0 || box->x_hi > metric.length())) {
      fail("initial position box must lie inside [0, L] on the periodic line");
    }
  } else if (const auto* grid = std::get_if<PhaseGrid>(&init)) {
    if (metric.kind() != MetricKind::PeriodicLine) fail("phase-grid initial data needs the periodic metric");
    if (grid->length != metric.length()) fail("phase-grid length differs from metric length");
    if (grid->cells == 0 || grid->velocities.empty() ||
        grid->mass.size() != grid->cells * grid->velocities.size()) {
      fail("phase-grid mass array has the wrong shape");
    }
    if (std::any_of(grid->mass.begin(), grid->mass.end(), [](double m) { return !(m >= 0.0); })) {
      fail("phase-grid masses must be nonnegative");
    }
  } else if (const auto* custom = std::get_if<CustomSampler>(&init)) {
    if (!custom->sample) fail("custom sampler is empty");
  }
  try {
    (void)build_discrete_table(kernel, n);
  } catch (const DegenerateKernel& e) {
    fail(e.what());
  }
}

ParticleEnsemble initialize(const SimConfig& config, Engine& engine) {
  ParticleEnsemble ens;
  ens.dim = config.metric.dim();
  const auto dim = static_cast<std::size_t>(ens.dim);
  ens.x.assign(config.n * dim, 0.0);
  ens.v.assign(config.n * dim, 0.0);

  if (const auto* box = std::get_if<UniformBox>(&config.init)) {
    for (std::size_t i = 0; i < config.n; ++i) {
      for (std::size_t c = 0; c < dim; ++c) {
        ens.x[i * dim + c] = box->x_lo + (box->x_hi - box->x_lo) * uniform01(engine);
        ens.v[i * dim + c] = box->v_lo + (box->v_hi - box->v_lo) * uniform01(engine);
      }
      ens.x[i * dim] = config.metric.wrap(ens.x[i * dim]);
    }
  } else if (const auto* grid = std::get_if<PhaseGrid>(&config.init)) {
    std::vector<double> cdf(grid->mass.size());
    CompensatedSum running;
    for (std::size_t k = 0; k < cdf.size(); ++k) {
      running += grid->mass[k];
      cdf[k] = running.value();
    }
    const double total = cdf.back();
    if (!(total > 0.0)) throw ConfigError("phase-grid initial data has zero mass");
    const std::size_t nv = grid->velocities.size();
    const double dx = grid->length / static_cast<double>(grid->cells);
    for (std::size_t i = 0; i < config.n; ++i) {
      const double u = uniform01(engine) * total;
      auto it = std::upper_bound(cdf.begin(), cdf.end(), u);
      if (it == cdf.end()) --it;
      const auto k = static_cast<std::size_t>(it - cdf.begin());
      const std::size_t cell = k / nv;
      ens.x[i] = config.metric.wrap((static_cast<double>(cell) + uniform01(engine)) * dx);
      ens.v[i] = grid->velocities[k % nv];
    }
  } else {
    const auto& custom = std::get<CustomSampler>(config.init);
    for (std::size_t i = 0; i < config.n; ++i) {
      custom.sample(engine, std::span<double>(ens.x.data() + i * dim, dim),
                    std::span<double>(ens.v.data() + i * dim, dim));
      ens.x[i * dim] = config.metric.wrap(ens.x[i * dim]);
    }
  }
  return ens;
}

ParticleSimulation::ParticleSimulation(ParticleEnsemble initial, const RankKernel& kernel,
                                       Metric metric, Engine engine, SelectionStrategy strategy)
    : state_(std::move(initial)),
      table_(build_discrete_table(kernel, state_.size())),
      metric_(metric),
      engine_(engine),
      strategy_(strategy),
      census_(state_) {
  if (state_.dim != metric_.dim()) throw DomainError("ensemble dimension differs from metric");
  if (census_.distinct() == 1) consensus_time_ = state_.t;
  draw_waiting_time();
}

namespace {

ParticleEnsemble initial_for(const SimConfig& config, Engine& engine) {
  config.validate();
  return initialize(config, engine);
}

}  // namespace

ParticleSimulation::ParticleSimulation(const SimConfig& config, std::uint64_t run_index)
    : ParticleSimulation(
          [&] {
            Engine e = stream_engine(config.seed, run_index);
            ParticleEnsemble ens = initial_for(config, e);
            return std::pair{std::move(ens), e};
          }(),
          config) {}

ParticleSimulation::ParticleSimulation(std::pair<ParticleEnsemble, Engine> seeded,
                                       const SimConfig& config)
    : ParticleSimulation(std::move(seeded.first), config.kernel, config.metric, seeded.second,
                         config.selection) {}

void ParticleSimulation::draw_waiting_time() {
  tau_ = exponential(engine_, static_cast<double>(state_.size()));
  t_next_ = state_.t + tau_;
}

CollisionEvent ParticleSimulation::next_event() {
  const std::size_t n = state_.size();
  const std::size_t follower = draw_follower(engine_, n);
  const double u_rank = uniform01(engine_);
  const auto dim = static_cast<std::size_t>(state_.dim);
  std::array<double, 2> before{};
  std::copy_n(state_.v.begin() + static_cast<std::ptrdiff_t>(follower * dim), dim, before.begin());

  const CollisionEvent event =
      apply_event(state_, table_, metric_, selector_, tau_, follower, u_rank, strategy_);
  census_.replace(std::span<const double>(before.data(), dim), state_.velocity(follower));
  if (!consensus_time_ && census_.distinct() == 1) consensus_time_ = event.t;
  if (event_callback_) event_callback_(event);
  draw_waiting_time();
  return event;
}

void ParticleSimulation::advance_to(double t) {
  while (t_next_ <= t) next_event();
}

std::vector<double> ParticleSimulation::positions_at(double t) const {
  const double dt = t - state_.t;
  std::vector<double> x(state_.x.size());
  for (std::size_t k = 0; k < x.size(); ++k) x[k] = metric_.wrap(state_.x[k] + dt * state_.v[k]);
  return x;
}

std::vector<double> sample_times(double t_end, double interval) {
  std::vector<double> times;
  for (std::size_t k = 0;; ++k) {
    const double t = static_cast<double>(k) * interval;
    if (t > t_end * (1.0 + 1e-12)) break;
    times.push_back(std::min(t, t_end));
  }
  if (times.back() < t_end) times.push_back(t_end);
  return times;
}

RunResult run(const SimConfig& config, std::uint64_t run_index) {
  ParticleSimulation sim(config, run_index);
  RunResult result;
  result.dim = config.metric.dim();
  if (config.record_events) {
    sim.on_event([&result](const CollisionEvent& e) { result.events.push_back(e); });
  }

  // Same grid as sample_times, generated lazily: consensus runs may use a
  // very large t_end and stop early.
  for (std::size_t k = 0;; ++k) {
    double t = static_cast<double>(k) * config.sample_interval;
    const bool last = t >= config.t_end * (1.0 - 1e-12);
    if (t > config.t_end * (1.0 + 1e-12) || last) t = config.t_end;
    sim.advance_to(t);
    ParticleEnsemble now = sim.state();
    now.x = sim.positions_at(t);
    now.t = t;
    result.diagnostics.times.push_back(t);
    result.diagnostics.distinct_velocities.push_back(sim.distinct_velocities());
    result.diagnostics.velocity_variance.push_back(velocity_variance(now));
    if (config.record_snapshots) result.snapshots.push_back(Snapshot{t, std::move(now.x), now.v});
    if (last || (config.stop_at_consensus && sim.consensus_time())) break;
  }
  result.diagnostics.consensus_time = sim.consensus_time();
  return result;
}

}  // namespace topokinetic
