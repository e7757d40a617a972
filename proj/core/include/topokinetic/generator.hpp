#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "topokinetic/kernel.hpp"
#include "topokinetic/particles.hpp"
#include "topokinetic/rank.hpp"

namespace topokinetic {

/// Test function of the full configuration with its x-gradient (same flat
/// layout as the positions), needed for the transport part of the generator.
struct StateFunction {
  std::string name;
  std::function<double(std::span<const double> x, std::span<const double> v)> value;
  std::function<std::vector<double>(std::span<const double> x, std::span<const double> v)>
      gradient_x;
};

struct GeneratorCheck {
  double mc_rate = 0.0;
  double exact_rate = 0.0;
  double standard_error = 0.0;
  double z = 0.0;
};

/// Generator of the jump process applied to phi at the given configuration:
/// sum_i v_i . grad_{x_i} phi + sum_{i != j} pi_ij [phi(v_i <- v_j) - phi].
double generator_rate(const ParticleEnsemble& state, const DiscreteKernelTable& table,
                      const Metric& metric, const StateFunction& phi);

/// Compares the enumerated generator with (E phi(Z(dt)) - phi(Z(0))) / dt
/// estimated from `samples` independent restarts of length dt.
GeneratorCheck generator_check(const ParticleEnsemble& state, const DiscreteKernelTable& table,
                               const Metric& metric, const StateFunction& phi, double dt,
                               std::size_t samples, std::uint64_t seed);

}  // namespace topokinetic
