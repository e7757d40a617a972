#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "topokinetic/kernel.hpp"

namespace topokinetic {

/// One-particle density on a periodic line of length L split into Nx cells,
/// with a finite velocity set. f[m * Nv + a] * dx is the mass of class a in
/// cell m; cell m is centred at (m + 1/2) dx.
struct KineticState {
  double length = 1.0;
  std::size_t cells = 0;
  std::vector<double> velocities;
  std::vector<double> f;
  double t = 0.0;

  [[nodiscard]] std::size_t classes() const { return velocities.size(); }
  [[nodiscard]] double dx() const { return length / static_cast<double>(cells); }
  [[nodiscard]] double& at(std::size_t m, std::size_t a) { return f[m * classes() + a]; }
  [[nodiscard]] double at(std::size_t m, std::size_t a) const { return f[m * classes() + a]; }
  [[nodiscard]] double cell_center(std::size_t m) const {
    return (static_cast<double>(m) + 0.5) * dx();
  }

  /// rho_m = sum_a f[m][a].
  [[nodiscard]] std::vector<double> density() const;
  /// g_a = sum_m f[m][a] dx.
  [[nodiscard]] std::vector<double> velocity_marginal() const;
  [[nodiscard]] double total_mass() const;
};

/// f[m][a] = w_a / L with w normalized to one.
KineticState homogeneous_state(double length, std::size_t cells, std::vector<double> velocities,
                               std::vector<double> weights);

/// f_a(x) = w_a (1 + A_a cos(2 pi k x / L + phase_a)) / L, stored as exact
/// cell averages and renormalized to total mass one. Requires |A_a| <= 1.
KineticState modulated_state(double length, std::size_t cells, std::vector<double> velocities,
                             std::vector<double> weights, std::vector<double> amplitudes,
                             std::vector<double> phases, int wavenumber = 1);

/// Distance-ordered mass shells around every cell.
///
/// Shell k of cell m holds the cells at periodic distance k * dx (one cell for
/// k = 0 and for k = Nx/2 when Nx is even, two otherwise). Masses are
/// fractions of the total, so the cumulative mass of the last shell is exactly
/// one. Each shell carries the kernel weight K(M_k) - K(M_{k-1}) of its
/// antiderivative and the per-unit-mass weight obtained by dividing by the
/// shell mass.
class PartialMassTable {
 public:
  PartialMassTable(const KineticState& state, const RankKernel& kernel);

  [[nodiscard]] std::size_t cells() const { return cells_; }
  [[nodiscard]] std::size_t shells() const { return shells_; }
  [[nodiscard]] double total_mass() const { return total_; }

  /// Cumulative mass fraction up to and including shell k.
  [[nodiscard]] double cumulative(std::size_t m, std::size_t k) const {
    return cumulative_[m * shells_ + k];
  }
  [[nodiscard]] double lower(std::size_t m, std::size_t k) const {
    return k == 0 ? 0.0 : cumulative(m, k - 1);
  }
  [[nodiscard]] double weight(std::size_t m, std::size_t k) const {
    return weight_[m * shells_ + k];
  }
  /// Kernel weight per unit (normalized) mass of shell k.
  [[nodiscard]] double unit_weight(std::size_t m, std::size_t k) const {
    return unit_weight_[m * shells_ + k];
  }

  /// Number of shells whose distance k * dx does not exceed radius s.
  [[nodiscard]] std::size_t shells_within(double s) const;

 private:
  std::size_t cells_;
  std::size_t shells_;
  double dx_;
  double total_;
  std::vector<double> cumulative_;
  std::vector<double> weight_;
  std::vector<double> unit_weight_;
};

/// Fraction of the total mass in cells whose centre lies within periodic
/// distance s of the centre of cell m (the cell itself included).
double partial_mass(const KineticState& state, std::size_t m, double s);

/// Integrand H of the mass change of variables, with optional exact
/// antiderivative and the interior points where H is not smooth.
struct MassIntegrand {
  std::string name;
  std::function<double(double)> value;
  std::function<double(double)> antiderivative;
  std::vector<double> breakpoints;
};

MassIntegrand unit_integrand();
MassIntegrand kernel_integrand(const RankKernel& kernel);
/// Throws NonSmoothKernel for kernels without a derivative.
MassIntegrand kernel_derivative_integrand(const RankKernel& kernel);

/// Adaptive Gauss-Kronrod integral of H over [a, b], split at its breakpoints.
double integrate(const MassIntegrand& h, double a, double b);

struct ChangeOfVariable {
  double lhs = 0.0;   // sum over shells within r of the integral of H across the shell
  double rhs = 0.0;   // integral of H from 0 to M(x_m, r)
  double mass = 0.0;  // M(x_m, r)
};

/// Discrete form of int_{B_r(x)} H(M(x,|x'-x|)) rho(x') dx' = int_0^{M(x,r)} H(p) dp:
/// lhs is computed shell by shell with quadrature, rhs from the antiderivative
/// when available.
ChangeOfVariable change_of_variable_check(const KineticState& state, const RankKernel& kernel,
                                          const MassIntegrand& h, std::size_t m, double r);
/// Same check on a prebuilt table, for sweeps over many cells and radii.
ChangeOfVariable change_of_variable_check(const PartialMassTable& table, const MassIntegrand& h,
                                          std::size_t m, double r);

/// rho(x) * int f(x', v) K(M(x, |x'-x|)) dx' with shell-averaged kernel
/// weights. Throws EmptyDensity if the state has no mass.
std::vector<double> gain_operator(const KineticState& state, const PartialMassTable& table);

enum class Splitting { Lie, Strang };
enum class CollisionScheme { ForwardEuler, Exponential };

struct StepOptions {
  Splitting splitting = Splitting::Lie;
  CollisionScheme collision = CollisionScheme::ForwardEuler;
  bool collisions = true;  // false: pure transport
};

/// Shifts every velocity class by v dt with periodic linear interpolation.
void transport(KineticState& state, double dt);

/// Relaxes f towards the gain term over dt with rho (and therefore the
/// shells) frozen; rho is invariant under this substep.
void collide(KineticState& state, const RankKernel& kernel, double dt, CollisionScheme scheme);

/// One split step of size dt (0 < dt <= 1, else StepTooLarge).
void step(KineticState& state, const RankKernel& kernel, double dt, const StepOptions& options = {});

struct KineticSolution {
  std::vector<double> times;
  std::vector<std::vector<double>> density;            // rho at each time
  std::vector<std::vector<double>> velocity_marginal;  // g at each time
  std::vector<double> mass;
  std::vector<KineticState> states;  // full dumps, only if requested
  KineticState final_state;
};

struct SolveOptions {
  double dt = 0.01;
  double t_end = 1.0;
  double sample_interval = 0.1;
  bool keep_states = false;
  StepOptions step;
};

/// Steps from the initial state to t_end, sampling observables every
/// round(sample_interval / dt) steps and at t_end.
KineticSolution solve(const KineticState& initial, const RankKernel& kernel,
                      const SolveOptions& options);

}  // namespace topokinetic
