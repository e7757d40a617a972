#pragma once

#include <cstddef>
#include <string>
#include <vector>

namespace topokinetic {

enum class KernelFamily { UniformCutoff, SmoothCutoff, PowerLaw, Constant };

enum class KernelOrder { Value, FirstDerivative, SecondDerivative, Antiderivative };

/// Rank kernel K on [0,1], normalized so that its integral is one.
///
/// Every family is closed-form: values, first and second derivatives and the
/// antiderivative (with zero at r = 0) are exact. `smooth()` reports whether
/// the kernel is C^2 on the closed interval.
///
///   Constant           K(r) = 1
///   UniformCutoff(t)   K(r) = 1/t on [0,t], 0 beyond (hard top-k kernel)
///   SmoothCutoff(t,e)  1 - P((r - t + e) / 2e) on the transition [t-e, t+e],
///                      renormalized; P is the C^3 septic smoothstep
///   PowerLaw(a)        K(r) = (a+1)(1-r)^a, or (a+1) r^a when mirrored
class RankKernel {
 public:
  static RankKernel constant();
  static RankKernel uniform_cutoff(double theta);
  static RankKernel smooth_cutoff(double theta, double eps);
  static RankKernel power_law(double alpha, bool mirrored = false);

  [[nodiscard]] KernelFamily family() const { return family_; }
  [[nodiscard]] double theta() const { return theta_; }
  [[nodiscard]] double eps() const { return eps_; }
  [[nodiscard]] double alpha() const { return alpha_; }
  [[nodiscard]] bool mirrored() const { return mirrored_; }
  [[nodiscard]] bool smooth() const;

  /// Throws DomainError if r is outside [0,1] and NonSmoothKernel if a
  /// derivative is requested where the family does not define one.
  [[nodiscard]] double eval(double r, KernelOrder order = KernelOrder::Value) const;

  [[nodiscard]] double value(double r) const { return eval(r, KernelOrder::Value); }
  [[nodiscard]] double derivative(double r) const { return eval(r, KernelOrder::FirstDerivative); }
  [[nodiscard]] double second_derivative(double r) const {
    return eval(r, KernelOrder::SecondDerivative);
  }
  [[nodiscard]] double antiderivative(double r) const {
    return eval(r, KernelOrder::Antiderivative);
  }

  /// Short human-readable label, e.g. "smoothcutoff(theta=0.5,eps=0.2)".
  [[nodiscard]] std::string describe() const;

 private:
  RankKernel(KernelFamily family, double theta, double eps, double alpha, bool mirrored);

  double eval_smooth_cutoff(double r, KernelOrder order) const;
  double eval_power_law(double r, KernelOrder order) const;

  KernelFamily family_;
  double theta_;
  double eps_;
  double alpha_;
  bool mirrored_;
  double normalizer_;  // SmoothCutoff: integral of the unnormalized profile
};

double eval_kernel(const RankKernel& kernel, double r, KernelOrder order = KernelOrder::Value);

/// Discrete normalization of a kernel for N particles.
///
/// weights[k-1] = K^N(k/(N-1)) for ranks k = 1..N-1, cdf is the running sum
/// (last entry exactly 1) and s_n = (1/(N-1)) sum_k K(k/(N-1)).
struct DiscreteKernelTable {
  std::size_t n = 0;
  std::vector<double> weights;
  std::vector<double> cdf;
  double s_n = 0.0;

  /// Weight of 1-based rank k.
  [[nodiscard]] double weight(std::size_t rank) const { return weights.at(rank - 1); }
  [[nodiscard]] std::size_t max_rank() const { return weights.size(); }
};

/// Throws DomainError if n < 2 and DegenerateKernel if every weight is zero.
DiscreteKernelTable build_discrete_table(const RankKernel& kernel, std::size_t n);

/// Smallest 1-based rank k with cdf[k] > u, for u in [0,1). Ranks with zero
/// weight are never returned.
std::size_t sample_rank(const DiscreteKernelTable& table, double u);

}  // namespace topokinetic
