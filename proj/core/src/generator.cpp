#include "topokinetic/generator.hpp"

#include <cmath>

#include "topokinetic/errors.hpp"
#include "topokinetic/random.hpp"
#include "topokinetic/summation.hpp"

namespace topokinetic {

double generator_rate(const ParticleEnsemble& state, const DiscreteKernelTable& table,
                      const Metric& metric, const StateFunction& phi) {
  const std::size_t n = state.size();
  const auto dim = static_cast<std::size_t>(state.dim);
  const double base = phi.value(state.x, state.v);

  CompensatedSum rate;
  const std::vector<double> grad = phi.gradient_x(state.x, state.v);
  if (grad.size() != state.x.size()) throw DomainError("gradient has the wrong size");
  for (std::size_t k = 0; k < grad.size(); ++k) rate += state.v[k] * grad[k];

  std::vector<double> jumped = state.v;
  for (std::size_t i = 0; i < n; ++i) {
    const std::vector<double> pi = interaction_probabilities(state.x, metric, table, i);
    for (std::size_t j = 0; j < n; ++j) {
      if (j == i || pi[j] == 0.0) continue;
      for (std::size_t c = 0; c < dim; ++c) jumped[i * dim + c] = state.v[j * dim + c];
      rate += pi[j] * (phi.value(state.x, jumped) - base);
    }
    for (std::size_t c = 0; c < dim; ++c) jumped[i * dim + c] = state.v[i * dim + c];
  }
  return rate.value();
}

GeneratorCheck generator_check(const ParticleEnsemble& state, const DiscreteKernelTable& table,
                               const Metric& metric, const StateFunction& phi, double dt,
                               std::size_t samples, std::uint64_t seed) {
  if (!(dt > 0.0)) throw DomainError("generator check needs dt > 0");
  if (samples < 2) throw DomainError("generator check needs at least two samples");
  const std::size_t n = state.size();
  const double base = phi.value(state.x, state.v);

  Engine engine = stream_engine(seed, 0);
  LeaderSelector selector;
  ParticleEnsemble work = state;
  // Welford accumulation of the increments phi(Z(dt)) - phi(Z(0)).
  double mean = 0.0;
  double m2 = 0.0;
  for (std::size_t s = 0; s < samples; ++s) {
    work.t = state.t;
    work.x = state.x;
    work.v = state.v;
    double elapsed = 0.0;
    for (;;) {
      const double tau = exponential(engine, static_cast<double>(n));
      if (elapsed + tau > dt) {
        free_flight(work, metric, dt - elapsed);
        break;
      }
      const auto follower = std::min(
          n - 1, static_cast<std::size_t>(uniform01(engine) * static_cast<double>(n)));
      apply_event(work, table, metric, selector, tau, follower, uniform01(engine));
      elapsed += tau;
    }
    const double delta = phi.value(work.x, work.v) - base;
    const double d1 = delta - mean;
    mean += d1 / static_cast<double>(s + 1);
    m2 += d1 * (delta - mean);
  }

  GeneratorCheck out;
  out.exact_rate = generator_rate(state, table, metric, phi);
  out.mc_rate = mean / dt;
  const double variance = m2 / static_cast<double>(samples - 1);
  out.standard_error = std::sqrt(variance / static_cast<double>(samples)) / dt;
  const double diff = out.mc_rate - out.exact_rate;
  if (out.standard_error > 0.0) {
    out.z = diff / out.standard_error;
  } else {
    out.z = std::abs(diff) <= 1e-12 * (1.0 + std::abs(out.exact_rate)) ? 0.0
                                                                       : std::copysign(INFINITY, diff);
  }
  return out;
}

}  // namespace topokinetic
