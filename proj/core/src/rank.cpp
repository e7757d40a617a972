#include "topokinetic/rank.hpp"

#include <algorithm>
#include <string>

#include "topokinetic/binomial.hpp"
#include "topokinetic/errors.hpp"
#include "topokinetic/random.hpp"

namespace topokinetic {
namespace {

void check_index(std::size_t index, std::size_t n) {
  if (index >= n) {
    throw IndexError("particle index " + std::to_string(index) + " out of range for N=" +
                     std::to_string(n));
  }
}

// Strict total order on (squared distance, index).
bool closer(double d2_a, std::size_t a, double d2_b, std::size_t b) {
  return d2_a < d2_b || (d2_a == d2_b && a < b);
}

}  // namespace

Metric Metric::euclidean(int dim) {
  if (dim != 1 && dim != 2) throw DomainError("euclidean metric supports dim 1 or 2");
  return Metric(MetricKind::Euclidean, dim, 0.0);
}

Metric Metric::periodic_line(double length) {
  if (!(length > 0.0) || !std::isfinite(length)) {
    throw DomainError("periodic line needs a positive finite length");
  }
  return Metric(MetricKind::PeriodicLine, 1, length);
}

std::size_t particle_count(std::span<const double> positions, const Metric& metric) {
  const auto dim = static_cast<std::size_t>(metric.dim());
  if (positions.size() % dim != 0) {
    throw DomainError("position buffer size is not a multiple of the dimension");
  }
  return positions.size() / dim;
}

RankView rank_view(std::span<const double> positions, const Metric& metric, std::size_t focal) {
  const std::size_t n = particle_count(positions, metric);
  check_index(focal, n);
  const auto dim = static_cast<std::size_t>(metric.dim());
  const double* xi = positions.data() + focal * dim;

  std::vector<std::pair<double, std::size_t>> entries;
  entries.reserve(n - 1);
  for (std::size_t j = 0; j < n; ++j) {
    if (j == focal) continue;
    entries.emplace_back(metric.squared_distance(xi, positions.data() + j * dim), j);
  }
  std::sort(entries.begin(), entries.end());

  RankView view;
  view.focal = focal;
  view.order.reserve(entries.size());
  view.distances.reserve(entries.size());
  for (const auto& [d2, j] : entries) {
    view.order.push_back(j);
    view.distances.push_back(std::sqrt(d2));
  }
  return view;
}

Rank rank_of(std::span<const double> positions, const Metric& metric, std::size_t i,
             std::size_t j) {
  const std::size_t n = particle_count(positions, metric);
  check_index(i, n);
  check_index(j, n);
  if (i == j) return Rank{0, 0.0};

  const auto dim = static_cast<std::size_t>(metric.dim());
  const double* xi = positions.data() + i * dim;
  const double d2_ij = metric.squared_distance(xi, positions.data() + j * dim);
  std::size_t r = 1;
  for (std::size_t k = 0; k < n; ++k) {
    if (k == i || k == j) continue;
    if (closer(metric.squared_distance(xi, positions.data() + k * dim), k, d2_ij, j)) ++r;
  }
  return Rank{r, static_cast<double>(r) / static_cast<double>(n - 1)};
}

std::vector<double> interaction_probabilities(std::span<const double> positions,
                                              const Metric& metric,
                                              const DiscreteKernelTable& table, std::size_t i) {
  const std::size_t n = particle_count(positions, metric);
  if (table.n != n) {
    throw DomainError("kernel table built for N=" + std::to_string(table.n) +
                      " used with N=" + std::to_string(n));
  }
  const RankView view = rank_view(positions, metric, i);
  std::vector<double> pi(n, 0.0);
  for (std::size_t m = 0; m < view.order.size(); ++m) pi[view.order[m]] = table.weights[m];
  return pi;
}

std::size_t LeaderSelector::at_rank(std::span<const double> positions, const Metric& metric,
                                    std::size_t focal, std::size_t rank,
                                    SelectionStrategy strategy) {
  const std::size_t n = particle_count(positions, metric);
  check_index(focal, n);
  if (rank < 1 || rank > n - 1) {
    throw IndexError("proximity rank " + std::to_string(rank) + " out of range for N=" +
                     std::to_string(n));
  }
  if (n == 2) return focal == 0 ? 1 : 0;

  const auto dim = static_cast<std::size_t>(metric.dim());
  const double* xi = positions.data() + focal * dim;
  scratch_.clear();
  scratch_.reserve(n - 1);
  for (std::size_t j = 0; j < n; ++j) {
    if (j == focal) continue;
    scratch_.emplace_back(metric.squared_distance(xi, positions.data() + j * dim), j);
  }
  const auto target = scratch_.begin() + static_cast<std::ptrdiff_t>(rank - 1);
  if (strategy == SelectionStrategy::Quickselect) {
    std::nth_element(scratch_.begin(), target, scratch_.end());
  } else {
    std::sort(scratch_.begin(), scratch_.end());
  }
  return target->second;
}

std::size_t LeaderSelector::select(std::span<const double> positions, const Metric& metric,
                                   const DiscreteKernelTable& table, std::size_t focal, double u,
                                   SelectionStrategy strategy) {
  return at_rank(positions, metric, focal, sample_rank(table, u), strategy);
}

std::size_t select_leader(std::span<const double> positions, const Metric& metric,
                          const DiscreteKernelTable& table, std::size_t focal, double u,
                          SelectionStrategy strategy) {
  LeaderSelector selector;
  return selector.select(positions, metric, table, focal, u, strategy);
}

std::vector<double> rank_distribution_oracle(double p, std::size_t n) {
  if (n < 2) throw DomainError("rank law needs N >= 2");
  return binomial_pmf(n - 2, p);
}

std::vector<std::uint64_t> sample_rank_law(std::size_t n, double p, std::size_t trials,
                                           std::uint64_t seed) {
  if (n < 2) throw DomainError("rank law needs at least two particles");
  if (!(p >= 0.0 && p <= 1.0)) throw DomainError("ball mass p must lie in [0,1]");
  const auto metric = Metric::periodic_line(1.0);
  std::vector<std::uint64_t> counts(n - 1, 0);
  std::vector<double> x(n);
  Engine engine = stream_engine(seed, 0);
  for (std::size_t t = 0; t < trials; ++t) {
    x[0] = 0.0;
    x[1] = 0.5 * p;
    for (std::size_t k = 2; k < n; ++k) x[k] = uniform01(engine);
    ++counts[rank_of(x, metric, 0, 1).rank - 1];
  }
  return counts;
}

}  // namespace topokinetic
