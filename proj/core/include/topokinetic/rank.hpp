#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "topokinetic/kernel.hpp"

namespace topokinetic {

enum class MetricKind { Euclidean, PeriodicLine };

/// Distance used to order neighbours. Positions are stored flat, `dim()`
/// coordinates per particle.
class Metric {
 public:
  static Metric euclidean(int dim);
  static Metric periodic_line(double length);

  [[nodiscard]] MetricKind kind() const { return kind_; }
  [[nodiscard]] int dim() const { return dim_; }
  [[nodiscard]] double length() const { return length_; }

  [[nodiscard]] double squared_distance(const double* a, const double* b) const {
    if (kind_ == MetricKind::PeriodicLine) {
      double d = std::abs(a[0] - b[0]);
      if (d >= length_) d = std::fmod(d, length_);
      d = std::min(d, length_ - d);
      return d * d;
    }
    double s = 0.0;
    for (int c = 0; c < dim_; ++c) {
      const double d = a[c] - b[c];
      s += d * d;
    }
    return s;
  }

  [[nodiscard]] double distance(const double* a, const double* b) const {
    return std::sqrt(squared_distance(a, b));
  }

  /// Maps a coordinate back into the fundamental domain (periodic metric only).
  [[nodiscard]] double wrap(double x) const {
    if (kind_ != MetricKind::PeriodicLine) return x;
    double y = std::fmod(x, length_);
    if (y < 0.0) y += length_;
    if (y >= length_) y = 0.0;
    return y;
  }

 private:
  Metric(MetricKind kind, int dim, double length) : kind_(kind), dim_(dim), length_(length) {}

  MetricKind kind_;
  int dim_;
  double length_;
};

/// Neighbours of a focal particle ordered by increasing distance; ties are
/// broken by smaller particle index.
struct RankView {
  std::size_t focal = 0;
  std::vector<std::size_t> order;
  std::vector<double> distances;
};

struct Rank {
  std::size_t rank = 0;   // R in {1..N-1}; 0 for the focal particle itself
  double fraction = 0.0;  // R / (N-1)
};

std::size_t particle_count(std::span<const double> positions, const Metric& metric);

RankView rank_view(std::span<const double> positions, const Metric& metric, std::size_t focal);

/// Rank of j with respect to i. Throws IndexError on out-of-range indices.
Rank rank_of(std::span<const double> positions, const Metric& metric, std::size_t i,
             std::size_t j);

/// pi_ij for all j (entry i is zero). The table must be built for the same N.
std::vector<double> interaction_probabilities(std::span<const double> positions,
                                              const Metric& metric,
                                              const DiscreteKernelTable& table, std::size_t i);

enum class SelectionStrategy { Quickselect, FullSort };

/// Picks the particle at a given proximity rank around a focal particle.
/// Keeps its scratch buffer between calls; not thread-safe, use one per worker.
class LeaderSelector {
 public:
  /// Index of the particle at 1-based proximity rank `rank` from `focal`.
  std::size_t at_rank(std::span<const double> positions, const Metric& metric, std::size_t focal,
                      std::size_t rank, SelectionStrategy strategy = SelectionStrategy::Quickselect);

  /// Draws a rank from the table with the uniform variate u and returns the leader.
  std::size_t select(std::span<const double> positions, const Metric& metric,
                     const DiscreteKernelTable& table, std::size_t focal, double u,
                     SelectionStrategy strategy = SelectionStrategy::Quickselect);

 private:
  std::vector<std::pair<double, std::size_t>> scratch_;
};

std::size_t select_leader(std::span<const double> positions, const Metric& metric,
                          const DiscreteKernelTable& table, std::size_t focal, double u,
                          SelectionStrategy strategy = SelectionStrategy::Quickselect);

/// Law of R^N(1,2) when the other N-2 particles fall in the ball with
/// probability p: P_R = C(N-2, R-1) p^(R-1) (1-p)^(N-1-R), entry R-1.
std::vector<double> rank_distribution_oracle(double p, std::size_t n);

/// Empirical law of R^N(1,2) on the unit torus: particle 1 at 0, particle 2 at
/// distance p/2 and N-2 uniform others, so the ball holds mass p. Returns
/// counts indexed by R-1 over `trials` independent configurations.
std::vector<std::uint64_t> sample_rank_law(std::size_t n, double p, std::size_t trials,
                                           std::uint64_t seed);

}  // namespace topokinetic
