#include "topokinetic/kinetic.hpp"

#include <algorithm>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>
#include <numbers>
#include <span>
#include <string>

#include "topokinetic/errors.hpp"
#include "topokinetic/summation.hpp"

namespace topokinetic {

std::vector<double> KineticState::density() const {
  std::vector<double> rho(cells, 0.0);
  for (std::size_t m = 0; m < cells; ++m) {
    for (std::size_t a = 0; a < classes(); ++a) rho[m] += at(m, a);
  }
  return rho;
}

std::vector<double> KineticState::velocity_marginal() const {
  std::vector<double> g(classes(), 0.0);
  for (std::size_t a = 0; a < classes(); ++a) {
    CompensatedSum s;
    for (std::size_t m = 0; m < cells; ++m) s += at(m, a) * dx();
    g[a] = s.value();
  }
  return g;
}

double KineticState::total_mass() const {
  CompensatedSum s;
  for (double v : f) s += v;
  return s.value() * dx();
}

namespace {

void check_shape(double length, std::size_t cells, const std::vector<double>& velocities) {
  if (!(length > 0.0)) throw ConfigError("domain length must be positive");
  if (cells == 0) throw ConfigError("kinetic grid needs at least one cell");
  if (velocities.empty()) throw ConfigError("kinetic grid needs at least one velocity");
}

std::vector<double> normalized(std::vector<double> weights, std::size_t count) {
  if (weights.empty()) weights.assign(count, 1.0);
  if (weights.size() != count) throw ConfigError("one weight per velocity class is required");
  CompensatedSum s;
  for (double w : weights) {
    if (!(w >= 0.0)) throw ConfigError("velocity weights must be nonnegative");
    s += w;
  }
  if (!(s.value() > 0.0)) throw ConfigError("velocity weights sum to zero");
  for (double& w : weights) w /= s.value();
  return weights;
}

void renormalize(KineticState& state) {
  const double mass = state.total_mass();
  if (!(mass > 0.0)) throw EmptyDensity("initial state has no mass");
  for (double& v : state.f) v /= mass;
}

}  // namespace

KineticState homogeneous_state(double length, std::size_t cells, std::vector<double> velocities,
                               std::vector<double> weights) {
  check_shape(length, cells, velocities);
  const std::vector<double> w = normalized(std::move(weights), velocities.size());
  KineticState s;
  s.length = length;
  s.cells = cells;
  s.velocities = std::move(velocities);
  s.f.resize(cells * s.classes());
  for (std::size_t m = 0; m < cells; ++m) {
    for (std::size_t a = 0; a < s.classes(); ++a) s.at(m, a) = w[a] / length;
  }
  return s;
}

KineticState modulated_state(double length, std::size_t cells, std::vector<double> velocities,
                             std::vector<double> weights, std::vector<double> amplitudes,
                             std::vector<double> phases, int wavenumber) {
  check_shape(length, cells, velocities);
  const std::size_t nv = velocities.size();
  const std::vector<double> w = normalized(std::move(weights), nv);
  if (amplitudes.empty()) amplitudes.assign(nv, 0.0);
  if (phases.empty()) phases.assign(nv, 0.0);
  if (amplitudes.size() != nv || phases.size() != nv) {
    throw ConfigError("amplitudes and phases need one entry per velocity class");
  }
  for (double amp : amplitudes) {
    if (!(std::abs(amp) <= 1.0)) throw ConfigError("modulation amplitudes must satisfy |A| <= 1");
  }
  if (wavenumber < 1) throw ConfigError("wavenumber must be >= 1");

  KineticState s;
  s.length = length;
  s.cells = cells;
  s.velocities = std::move(velocities);
  s.f.resize(cells * nv);
  const double omega = 2.0 * std::numbers::pi * wavenumber / length;
  const double dx = s.dx();
  for (std::size_t m = 0; m < cells; ++m) {
    const double x0 = static_cast<double>(m) * dx;
    const double x1 = static_cast<double>(m + 1) * dx;
    for (std::size_t a = 0; a < nv; ++a) {
      const double mean_cos =
          (std::sin(omega * x1 + phases[a]) - std::sin(omega * x0 + phases[a])) / (omega * dx);
      s.at(m, a) = std::max(0.0, w[a] * (1.0 + amplitudes[a] * mean_cos) / length);
    }
  }
  renormalize(s);
  return s;
}

PartialMassTable::PartialMassTable(const KineticState& state, const RankKernel& kernel)
    : cells_(state.cells), shells_(state.cells / 2 + 1), dx_(state.dx()) {
  const std::vector<double> rho = state.density();
  CompensatedSum total;
  for (double r : rho) total += r * dx_;
  total_ = total.value();
  if (!(total_ > 0.0)) throw EmptyDensity("density has zero total mass");

  std::vector<double> q(cells_);
  for (std::size_t m = 0; m < cells_; ++m) q[m] = rho[m] * dx_ / total_;

  cumulative_.assign(cells_ * shells_, 0.0);
  weight_.assign(cells_ * shells_, 0.0);
  unit_weight_.assign(cells_ * shells_, 0.0);
  for (std::size_t m = 0; m < cells_; ++m) {
    CompensatedSum running;
    double previous = 0.0;
    double previous_anti = 0.0;
    for (std::size_t k = 0; k < shells_; ++k) {
      const std::size_t right = (m + k) % cells_;
      const std::size_t left = (m + cells_ - k) % cells_;
      running += q[right];
      if (left != right) running += q[left];
      double upper = std::clamp(running.value(), previous, 1.0);
      if (k + 1 == shells_) upper = 1.0;
      const double anti = kernel.antiderivative(upper);
      const double w = anti - previous_anti;
      const double width = upper - previous;
      const std::size_t idx = m * shells_ + k;
      cumulative_[idx] = upper;
      weight_[idx] = w;
      unit_weight_[idx] = width > 0.0 ? w / width : kernel.value(previous);
      previous = upper;
      previous_anti = anti;
    }
  }
}

std::size_t PartialMassTable::shells_within(double s) const {
  if (!(s >= 0.0)) throw DomainError("radius must be nonnegative");
  const double k = std::floor(s / dx_ * (1.0 + 1e-12) + 1e-12);
  if (k + 1.0 >= static_cast<double>(shells_)) return shells_;
  return static_cast<std::size_t>(k) + 1;
}

double partial_mass(const KineticState& state, std::size_t m, double s) {
  if (m >= state.cells) throw IndexError("cell index out of range");
  if (!(s >= 0.0)) throw DomainError("radius must be nonnegative");
  const std::size_t shells = state.cells / 2 + 1;
  const double k_max = std::floor(s / state.dx() * (1.0 + 1e-12) + 1e-12);
  if (k_max + 1.0 >= static_cast<double>(shells)) return 1.0;
  const auto within = static_cast<std::size_t>(k_max);

  const std::vector<double> rho = state.density();
  CompensatedSum total;
  for (double r : rho) total += r;
  if (!(total.value() > 0.0)) throw EmptyDensity("density has zero total mass");
  CompensatedSum inside;
  inside += rho[m];
  for (std::size_t k = 1; k <= within; ++k) {
    const std::size_t right = (m + k) % state.cells;
    const std::size_t left = (m + state.cells - k) % state.cells;
    inside += rho[right];
    if (left != right) inside += rho[left];
  }
  return std::min(1.0, inside.value() / total.value());
}

namespace {

std::vector<double> kernel_breakpoints(const RankKernel& kernel) {
  std::vector<double> points;
  if (kernel.family() == KernelFamily::UniformCutoff) points.push_back(kernel.theta());
  if (kernel.family() == KernelFamily::SmoothCutoff) {
    points.push_back(kernel.theta() - kernel.eps());
    points.push_back(kernel.theta() + kernel.eps());
  }
  std::erase_if(points, [](double p) { return p <= 0.0 || p >= 1.0; });
  return points;
}

}  // namespace

MassIntegrand unit_integrand() {
  return MassIntegrand{"one", [](double) { return 1.0; }, [](double p) { return p; }, {}};
}

MassIntegrand kernel_integrand(const RankKernel& kernel) {
  return MassIntegrand{"K", [kernel](double p) { return kernel.value(p); },
                       [kernel](double p) { return kernel.antiderivative(p); },
                       kernel_breakpoints(kernel)};
}

MassIntegrand kernel_derivative_integrand(const RankKernel& kernel) {
  if (!kernel.smooth()) {
    throw NonSmoothKernel("kernel " + kernel.describe() + " has no derivative");
  }
  return MassIntegrand{"dK", [kernel](double p) { return kernel.derivative(p); },
                       [kernel](double p) { return kernel.value(p); }, kernel_breakpoints(kernel)};
}

namespace {

using Kronrod = boost::math::quadrature::gauss_kronrod<double, 15>;

// One Kronrod panel. Boost reports the error of a single panel on the
// reference interval [-1,1], so it is rescaled here to match value and L1.
double kronrod_panel(const std::function<double(double)>& f, double a, double b, double& error,
                     double& l1) {
  const double value = Kronrod::integrate(f, a, b, 0, 0.0, &error, &l1);
  error *= 0.5 * (b - a);
  return value;
}

// Bisects until the Kronrod error estimate falls below an absolute budget.
// Boost's own adaptive driver measures tolerance against the integral, which
// never settles for pieces whose positive and negative parts cancel.
double adaptive_kronrod(const std::function<double(double)>& f, double a, double b, double budget,
                        int depth) {
  double error = 0.0;
  double l1 = 0.0;
  const double value = kronrod_panel(f, a, b, error, l1);
  // below ~1e-9 relative width the node positions themselves are rounded
  const bool narrow = (b - a) <= 1e-9 * (std::abs(a) + std::abs(b));
  if (error <= budget || depth == 0 || narrow) return value;
  const double mid = 0.5 * (a + b);
  return adaptive_kronrod(f, a, mid, 0.5 * budget, depth - 1) +
         adaptive_kronrod(f, mid, b, 0.5 * budget, depth - 1);
}

double kronrod_piece(const std::function<double(double)>& f, double a, double b) {
  double error = 0.0;
  double l1 = 0.0;
  const double value = kronrod_panel(f, a, b, error, l1);
  // kernel values carry absolute roundoff of a few ulps even where they are tiny
  const double budget = 1e-14 * l1 + 1e-15 * (b - a);
  if (error <= budget) return value;
  return adaptive_kronrod(f, a, b, budget, 12);
}

}  // namespace

double integrate(const MassIntegrand& h, double a, double b) {
  if (!(b > a)) return 0.0;
  std::vector<double> nodes{a};
  for (double p : h.breakpoints) {
    if (p > a && p < b) nodes.push_back(p);
  }
  nodes.push_back(b);
  std::sort(nodes.begin(), nodes.end());
  CompensatedSum sum;
  for (std::size_t i = 0; i + 1 < nodes.size(); ++i) {
    sum += kronrod_piece(h.value, nodes[i], nodes[i + 1]);
  }
  return sum.value();
}

ChangeOfVariable change_of_variable_check(const KineticState& state, const RankKernel& kernel,
                                          const MassIntegrand& h, std::size_t m, double r) {
  if (m >= state.cells) throw IndexError("cell index out of range");
  return change_of_variable_check(PartialMassTable(state, kernel), h, m, r);
}

ChangeOfVariable change_of_variable_check(const PartialMassTable& table, const MassIntegrand& h,
                                          std::size_t m, double r) {
  if (m >= table.cells()) throw IndexError("cell index out of range");
  const std::size_t within = table.shells_within(r);
  ChangeOfVariable out;
  CompensatedSum lhs;
  for (std::size_t k = 0; k < within; ++k) {
    lhs += integrate(h, table.lower(m, k), table.cumulative(m, k));
  }
  out.lhs = lhs.value();
  out.mass = table.cumulative(m, within - 1);
  out.rhs = h.antiderivative ? h.antiderivative(out.mass) - h.antiderivative(0.0)
                             : integrate(h, 0.0, out.mass);
  return out;
}

namespace {

// Applies the frozen-shell gain map to an arbitrary f with the same layout.
void apply_gain(const KineticState& shape, const PartialMassTable& table,
                std::span<const double> rho, std::span<const double> f, std::span<double> out) {
  const std::size_t nx = shape.cells;
  const std::size_t nv = shape.classes();
  const double scale = shape.dx() / table.total_mass();
  std::vector<double> acc(nv);
  for (std::size_t m = 0; m < nx; ++m) {
    std::fill(acc.begin(), acc.end(), 0.0);
    for (std::size_t k = 0; k < table.shells(); ++k) {
      const double w = table.unit_weight(m, k);
      if (w == 0.0) continue;
      const std::size_t right = (m + k) % nx;
      const std::size_t left = (m + nx - k) % nx;
      const double* fr = f.data() + right * nv;
      if (left != right) {
        const double* fl = f.data() + left * nv;
        for (std::size_t a = 0; a < nv; ++a) acc[a] += w * (fr[a] + fl[a]);
      } else {
        for (std::size_t a = 0; a < nv; ++a) acc[a] += w * fr[a];
      }
    }
    for (std::size_t a = 0; a < nv; ++a) out[m * nv + a] = rho[m] * acc[a] * scale;
  }
}

}  // namespace

std::vector<double> gain_operator(const KineticState& state, const PartialMassTable& table) {
  if (table.cells() != state.cells) throw GridMismatch("mass table built for another grid");
  const std::vector<double> rho = state.density();
  std::vector<double> out(state.f.size());
  apply_gain(state, table, rho, state.f, out);
  return out;
}

void transport(KineticState& state, double dt) {
  const std::size_t nx = state.cells;
  const std::size_t nv = state.classes();
  std::vector<double> column(nx);
  for (std::size_t a = 0; a < nv; ++a) {
    const double shift = state.velocities[a] * dt / state.dx();
    double whole = std::floor(shift);
    double frac = shift - whole;
    if (frac < 1e-12) frac = 0.0;
    if (frac > 1.0 - 1e-12) {
      frac = 0.0;
      whole += 1.0;
    }
    const auto n = static_cast<long long>(nx);
    const auto q = static_cast<long long>(((static_cast<long long>(whole) % n) + n) % n);
    for (std::size_t m = 0; m < nx; ++m) {
      const auto src = static_cast<std::size_t>(((static_cast<long long>(m) - q) % n + n) % n);
      const std::size_t src_next = (src + nx - 1) % nx;
      column[m] = (1.0 - frac) * state.at(src, a) + (frac > 0.0 ? frac * state.at(src_next, a) : 0.0);
    }
    for (std::size_t m = 0; m < nx; ++m) state.at(m, a) = column[m];
  }
}

void collide(KineticState& state, const RankKernel& kernel, double dt, CollisionScheme scheme) {
  const PartialMassTable table(state, kernel);
  const std::vector<double> rho = state.density();
  const std::size_t size = state.f.size();
  std::vector<double> gain(size);
  apply_gain(state, table, rho, state.f, gain);

  if (scheme == CollisionScheme::ForwardEuler) {
    for (std::size_t i = 0; i < size; ++i) state.f[i] = (1.0 - dt) * state.f[i] + dt * gain[i];
    return;
  }

  // exp(dt (G - I)) f = e^{-dt} sum_k dt^k / k! G^k f, with G frozen. The
  // truncated tail is folded into the last term so the coefficients sum to one.
  std::vector<double> acc(size);
  std::vector<double> term = gain;
  std::vector<double> next(size);
  double coefficient = std::exp(-dt);
  double used = coefficient;
  for (std::size_t i = 0; i < size; ++i) acc[i] = coefficient * state.f[i];
  for (int k = 1;; ++k) {
    coefficient *= dt / k;
    if (coefficient < 1e-18 || k >= 64) {
      const double tail = std::max(0.0, 1.0 - used);
      for (std::size_t i = 0; i < size; ++i) acc[i] += tail * term[i];
      break;
    }
    for (std::size_t i = 0; i < size; ++i) acc[i] += coefficient * term[i];
    used += coefficient;
    apply_gain(state, table, rho, term, next);
    term.swap(next);
  }
  state.f.swap(acc);
}

void step(KineticState& state, const RankKernel& kernel, double dt, const StepOptions& options) {
  if (dt > 1.0) throw StepTooLarge("kinetic step requires dt <= 1, got " + std::to_string(dt));
  if (!(dt > 0.0)) throw DomainError("kinetic step requires dt > 0");
  if (!options.collisions) {
    transport(state, dt);
  } else if (options.splitting == Splitting::Lie) {
    transport(state, dt);
    collide(state, kernel, dt, options.collision);
  } else {
    collide(state, kernel, 0.5 * dt, options.collision);
    transport(state, dt);
    collide(state, kernel, 0.5 * dt, options.collision);
  }
  state.t += dt;
}

KineticSolution solve(const KineticState& initial, const RankKernel& kernel,
                      const SolveOptions& options) {
  if (options.dt > 1.0) throw StepTooLarge("kinetic step requires dt <= 1");
  if (!(options.dt > 0.0)) throw ConfigError("dt must be positive");
  if (!(options.t_end >= 0.0)) throw ConfigError("t_end must be >= 0");
  if (!(options.sample_interval > 0.0)) throw ConfigError("sample_interval must be positive");

  KineticSolution out;
  KineticState state = initial;
  const double t0 = state.t;
  auto record = [&] {
    out.times.push_back(state.t);
    out.density.push_back(state.density());
    out.velocity_marginal.push_back(state.velocity_marginal());
    out.mass.push_back(state.total_mass());
    if (options.keep_states) out.states.push_back(state);
  };

  const auto full_steps = static_cast<std::size_t>(std::floor(options.t_end / options.dt + 1e-9));
  const double remainder = options.t_end - static_cast<double>(full_steps) * options.dt;
  const auto every = std::max<std::size_t>(
      1, static_cast<std::size_t>(std::llround(options.sample_interval / options.dt)));

  record();
  for (std::size_t i = 1; i <= full_steps; ++i) {
    step(state, kernel, options.dt, options.step);
    state.t = t0 + static_cast<double>(i) * options.dt;
    if (i % every == 0 || (i == full_steps && remainder <= 1e-12 * options.dt)) record();
  }
  if (remainder > 1e-12 * options.dt) {
    step(state, kernel, remainder, options.step);
    state.t = t0 + options.t_end;
    record();
  }
  out.final_state = state;
  return out;
}

}  // namespace topokinetic
