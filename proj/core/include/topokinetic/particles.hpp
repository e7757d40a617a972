#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <span>
#include <utility>
#include <variant>
#include <vector>

#include "topokinetic/kernel.hpp"
#include "topokinetic/random.hpp"
#include "topokinetic/rank.hpp"

namespace topokinetic {

/// Positions and velocities of N particles at time t, `dim` components each.
struct ParticleEnsemble {
  double t = 0.0;
  int dim = 1;
  std::vector<double> x;
  std::vector<double> v;

  [[nodiscard]] std::size_t size() const { return x.size() / static_cast<std::size_t>(dim); }
  [[nodiscard]] std::span<const double> position(std::size_t i) const {
    return {x.data() + i * static_cast<std::size_t>(dim), static_cast<std::size_t>(dim)};
  }
  [[nodiscard]] std::span<const double> velocity(std::size_t i) const {
    return {v.data() + i * static_cast<std::size_t>(dim), static_cast<std::size_t>(dim)};
  }
};

struct CollisionEvent {
  double t = 0.0;
  std::size_t follower = 0;
  std::size_t leader = 0;
};

/// Trace of the empirical covariance of the velocities (1/N normalization).
double velocity_variance(const ParticleEnsemble& ensemble);

/// Number of distinct velocity vectors, compared bit for bit.
std::size_t distinct_velocity_count(const ParticleEnsemble& ensemble);

/// Multiset of velocity values keyed by their bit patterns.
class VelocityCensus {
 public:
  explicit VelocityCensus(const ParticleEnsemble& ensemble);

  /// Records that particle `follower` changed velocity from `before` to `after`.
  void replace(std::span<const double> before, std::span<const double> after);
  [[nodiscard]] std::size_t distinct() const { return counts_.size(); }

 private:
  using Key = std::array<std::uint64_t, 2>;
  static Key key(std::span<const double> velocity);
  std::map<Key, std::size_t> counts_;
};

/// Moves every particle along its velocity for a duration tau.
void free_flight(ParticleEnsemble& ensemble, const Metric& metric, double tau);

/// Free flight over tau, then the follower adopts the velocity of the particle
/// at the proximity rank drawn from u_rank. Positions are unchanged by the jump.
CollisionEvent apply_event(ParticleEnsemble& ensemble, const DiscreteKernelTable& table,
                           const Metric& metric, LeaderSelector& selector, double tau,
                           std::size_t follower, double u_rank,
                           SelectionStrategy strategy = SelectionStrategy::Quickselect);

/// One step of the jump process: waiting time ~ Exp(N), uniform follower,
/// leader by rank. Draws are taken from the engine in that order.
CollisionEvent step_to_next_event(ParticleEnsemble& ensemble, const DiscreteKernelTable& table,
                                  const Metric& metric, Engine& engine, LeaderSelector& selector,
                                  SelectionStrategy strategy = SelectionStrategy::Quickselect);

/// Positions and velocities i.i.d. uniform on [lo,hi]^dim boxes.
struct UniformBox {
  double x_lo = -10.0;
  double x_hi = 10.0;
  double v_lo = -10.0;
  double v_hi = 10.0;
};

/// One-particle law given as masses on a periodic cell grid times a finite
/// velocity set; mass is row-major (cell, velocity class). Positions are
/// uniform inside the drawn cell.
struct PhaseGrid {
  double length = 1.0;
  std::size_t cells = 0;
  std::vector<double> velocities;
  std::vector<double> mass;
};

/// User sampler filling the position and velocity of a single particle.
struct CustomSampler {
  std::function<void(Engine&, std::span<double>, std::span<double>)> sample;
};

using InitialCondition = std::variant<UniformBox, PhaseGrid, CustomSampler>;

struct SimConfig {
  std::size_t n = 10;
  RankKernel kernel = RankKernel::constant();
  Metric metric = Metric::euclidean(1);
  double t_end = 10.0;
  InitialCondition init = UniformBox{};
  std::uint64_t seed = 0;
  double sample_interval = 0.1;
  bool record_snapshots = true;
  bool record_events = false;
  bool stop_at_consensus = false;
  SelectionStrategy selection = SelectionStrategy::Quickselect;

  /// Throws ConfigError describing the first invalid field.
  void validate() const;
};

/// Draws the initial ensemble of a run (i.i.d. particles).
ParticleEnsemble initialize(const SimConfig& config, Engine& engine);

/// Exact event-driven simulation of one run. The next event time is drawn
/// once and kept, so observing the state at intermediate times does not
/// perturb the trajectory.
class ParticleSimulation {
 public:
  /// Run `run_index` of the config; its random stream depends only on
  /// (seed, run_index).
  explicit ParticleSimulation(const SimConfig& config, std::uint64_t run_index = 0);
  ParticleSimulation(ParticleEnsemble initial, const RankKernel& kernel, Metric metric,
                     Engine engine, SelectionStrategy strategy = SelectionStrategy::Quickselect);

  /// Processes every event with time <= t. State stays at the last event.
  void advance_to(double t);

  /// Processes exactly one event and returns it.
  CollisionEvent next_event();

  [[nodiscard]] double next_event_time() const { return t_next_; }

  /// Ensemble at the last processed event.
  [[nodiscard]] const ParticleEnsemble& state() const { return state_; }

  /// Positions at time t >= state().t by free flight, without touching the state.
  [[nodiscard]] std::vector<double> positions_at(double t) const;

  [[nodiscard]] std::size_t distinct_velocities() const { return census_.distinct(); }
  [[nodiscard]] std::optional<double> consensus_time() const { return consensus_time_; }

  void on_event(std::function<void(const CollisionEvent&)> callback) {
    event_callback_ = std::move(callback);
  }

 private:
  ParticleSimulation(std::pair<ParticleEnsemble, Engine> seeded, const SimConfig& config);
  void draw_waiting_time();

  ParticleEnsemble state_;
  DiscreteKernelTable table_;
  Metric metric_;
  Engine engine_;
  LeaderSelector selector_;
  SelectionStrategy strategy_;
  VelocityCensus census_;
  double tau_ = 0.0;
  double t_next_ = 0.0;
  std::optional<double> consensus_time_;
  std::function<void(const CollisionEvent&)> event_callback_;
};

struct DiagnosticsSeries {
  std::vector<double> times;
  std::vector<double> velocity_variance;
  std::vector<std::size_t> distinct_velocities;
  std::optional<double> consensus_time;
};

struct Snapshot {
  double t = 0.0;
  std::vector<double> x;
  std::vector<double> v;
};

struct RunResult {
  int dim = 1;
  std::vector<Snapshot> snapshots;
  DiagnosticsSeries diagnostics;
  std::vector<CollisionEvent> events;
};

/// Sample times 0, h, 2h, ... up to t_end, with t_end appended if it is not
/// on the grid.
std::vector<double> sample_times(double t_end, double interval);

/// Simulates one run. With stop_at_consensus the series ends at the first
/// sample time after consensus.
RunResult run(const SimConfig& config, std::uint64_t run_index = 0);

}  // namespace topokinetic
