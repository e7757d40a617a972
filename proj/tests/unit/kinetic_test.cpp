#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>

#include "topokinetic/errors.hpp"
#include "topokinetic/kinetic.hpp"
#include "topokinetic/random.hpp"

namespace tk = topokinetic;

namespace {

tk::KineticState random_state(std::size_t cells, std::size_t classes, std::uint64_t seed) {
  tk::Engine eng(seed);
  tk::KineticState s;
  s.length = 1.0;
  s.cells = cells;
  for (std::size_t a = 0; a < classes; ++a) s.velocities.push_back(static_cast<double>(a) - 1.0);
  s.f.resize(cells * classes);
  for (double& v : s.f) v = tk::uniform01(eng);
  const double mass = s.total_mass();
  for (double& v : s.f) v /= mass;
  return s;
}

double max_abs_diff(const std::vector<double>& a, const std::vector<double>& b) {
  double d = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) d = std::max(d, std::abs(a[i] - b[i]));
  return d;
}

}  // namespace

TEST(KineticState, Constructors) {
  const auto h = tk::homogeneous_state(2.0, 16, {-1.0, 0.5}, {3.0, 1.0});
  EXPECT_NEAR(h.total_mass(), 1.0, 1e-15);
  EXPECT_DOUBLE_EQ(h.at(3, 0), 0.75 / 2.0);
  const auto g = h.velocity_marginal();
  EXPECT_NEAR(g[0], 0.75, 1e-15);
  EXPECT_NEAR(g[1], 0.25, 1e-15);

  const auto m = tk::modulated_state(1.0, 32, {-1.0, 1.0}, {}, {0.9, -0.4}, {0.0, 1.0}, 2);
  EXPECT_NEAR(m.total_mass(), 1.0, 1e-14);
  EXPECT_TRUE(std::all_of(m.f.begin(), m.f.end(), [](double v) { return v >= 0.0; }));
  EXPECT_THROW(tk::modulated_state(1.0, 8, {0.0}, {}, {1.5}, {}), tk::ConfigError);
  EXPECT_THROW(tk::homogeneous_state(1.0, 0, {0.0}, {}), tk::ConfigError);
}

TEST(PartialMass, SpecExamples) {
  const auto u = tk::homogeneous_state(1.0, 40, {0.0}, {});
  EXPECT_NEAR(tk::partial_mass(u, 7, 0.0), 1.0 / 40.0, 1e-15);
  // cells whose centres lie within 10 dx: 21 of 40
  EXPECT_NEAR(tk::partial_mass(u, 7, 0.25), 21.0 / 40.0, 1e-15);
  EXPECT_EQ(tk::partial_mass(u, 7, 0.5), 1.0);
  EXPECT_EQ(tk::partial_mass(u, 7, 3.0), 1.0);
  const auto r = random_state(9, 2, 4);
  const auto rho = r.density();
  EXPECT_NEAR(tk::partial_mass(r, 0, 0.0), rho[0] * r.dx(), 1e-15);
  EXPECT_NEAR(tk::partial_mass(r, 0, r.dx()), (rho[8] + rho[0] + rho[1]) * r.dx(), 1e-15);
  EXPECT_THROW(tk::partial_mass(r, 9, 0.1), tk::IndexError);
}

TEST(PartialMassTable, ShellsAndWeights) {
  const auto k = tk::RankKernel::smooth_cutoff(0.4, 0.2);
  for (std::size_t cells : {1u, 2u, 7u, 8u, 33u}) {
    const auto s = random_state(cells, 3, cells);
    const tk::PartialMassTable t(s, k);
    EXPECT_EQ(t.shells(), cells / 2 + 1);
    const auto rho = s.density();
    for (std::size_t m = 0; m < cells; ++m) {
      double sum = 0.0;
      for (std::size_t sh = 0; sh < t.shells(); ++sh) {
        sum += t.weight(m, sh);
        EXPECT_LE(t.lower(m, sh), t.cumulative(m, sh));
        EXPECT_NEAR(t.cumulative(m, sh), tk::partial_mass(s, m, sh * s.dx()), 1e-14);
      }
      EXPECT_EQ(t.cumulative(m, t.shells() - 1), 1.0);
      EXPECT_NEAR(sum, 1.0, 1e-13);
    }
  }
}

TEST(ChangeOfVariable, SpecExamples) {
  const auto k = tk::RankKernel::smooth_cutoff(0.3, 0.1);
  const auto s = random_state(24, 2, 8);
  for (std::size_t m : {0u, 5u, 23u}) {
    for (double r : {0.0, 0.1, 0.33}) {
      const auto c = tk::change_of_variable_check(s, k, tk::unit_integrand(), m, r);
      EXPECT_NEAR(c.lhs, c.mass, 1e-14);
      EXPECT_NEAR(c.rhs, c.mass, 1e-15);
    }
    const auto full = tk::change_of_variable_check(s, k, tk::kernel_integrand(k), m, 0.5);
    EXPECT_NEAR(full.lhs, 1.0, 1e-12);
    EXPECT_EQ(full.rhs, 1.0);
  }
  const auto u = tk::homogeneous_state(1.0, 50, {0.0}, {});
  const auto c = tk::change_of_variable_check(u, tk::RankKernel::constant(),
                                              tk::kernel_integrand(tk::RankKernel::constant()), 0, 0.2);
  EXPECT_NEAR(c.lhs, 0.4, 1.0 / 50.0 + 1e-12);
  EXPECT_NEAR(c.lhs, c.rhs, 1e-14);
}

TEST(ChangeOfVariable, DerivativeIntegrandNeedsSmoothKernel) {
  EXPECT_THROW(tk::kernel_derivative_integrand(tk::RankKernel::uniform_cutoff(0.5)),
               tk::NonSmoothKernel);
  const auto k = tk::RankKernel::power_law(3.0);
  const auto s = random_state(16, 1, 2);
  const auto c = tk::change_of_variable_check(s, k, tk::kernel_derivative_integrand(k), 3, 0.2);
  EXPECT_NEAR(c.lhs, c.rhs, 1e-12);
  EXPECT_NEAR(c.rhs, k.value(c.mass) - k.value(0.0), 1e-14);
}

TEST(Gain, HomogeneousStateIsAFixedPoint) {
  for (const auto& k : {tk::RankKernel::constant(), tk::RankKernel::uniform_cutoff(0.3),
                        tk::RankKernel::smooth_cutoff(0.5, 0.2), tk::RankKernel::power_law(1.7)}) {
    const auto s = tk::homogeneous_state(1.0, 31, {-1.0, 0.0, 2.0}, {0.2, 0.5, 0.3});
    const auto gain = tk::gain_operator(s, tk::PartialMassTable(s, k));
    EXPECT_LT(max_abs_diff(gain, s.f), 1e-14) << k.describe();
  }
}

TEST(Gain, ConservesMassAndRowIdentity) {
  const auto k = tk::RankKernel::smooth_cutoff(0.35, 0.15);
  auto s = random_state(20, 1, 9);
  const tk::PartialMassTable t(s, k);
  const auto gain = tk::gain_operator(s, t);
  double total = 0.0;
  for (double g : gain) total += g * s.dx();
  EXPECT_NEAR(total, 1.0, 1e-14);
  // With Nv = 1 and f = rho the row identity sum_m' rho_m' Kbar dx = 1 gives gain = rho.
  for (std::size_t m = 0; m < s.cells; ++m) EXPECT_NEAR(gain[m], s.f[m], 1e-13);
}

TEST(Gain, TwoCellHandComputation) {
  // rho dx = (0.6, 0.4) and K(r) = 2r: cell 0 sees shells (0.6, 1) with unit
  // weights (0.6, 1.6); cell 1 sees (0.4, 1) with (0.4, 1.4).
  tk::KineticState s;
  s.length = 1.0;
  s.cells = 2;
  s.velocities = {-1.0, 1.0};
  s.f = {0.9, 0.3, 0.2, 0.6};
  const tk::PartialMassTable t(s, tk::RankKernel::power_law(1.0, true));
  EXPECT_NEAR(t.unit_weight(0, 0), 0.6, 1e-15);
  EXPECT_NEAR(t.unit_weight(0, 1), 1.6, 1e-15);
  EXPECT_NEAR(t.unit_weight(1, 1), 1.4, 1e-15);
  const auto gain = tk::gain_operator(s, t);
  EXPECT_NEAR(gain[0], 0.516, 1e-15);
  EXPECT_NEAR(gain[1], 0.684, 1e-15);
  EXPECT_NEAR(gain[2], 0.536, 1e-15);
  EXPECT_NEAR(gain[3], 0.264, 1e-15);
}

TEST(Gain, PositiveAndRejectsEmptyDensity) {
  const auto k = tk::RankKernel::power_law(2.0);
  const auto s = random_state(12, 2, 5);
  const auto gain = tk::gain_operator(s, tk::PartialMassTable(s, k));
  EXPECT_TRUE(std::all_of(gain.begin(), gain.end(), [](double v) { return v >= 0.0; }));
  tk::KineticState empty = s;
  std::fill(empty.f.begin(), empty.f.end(), 0.0);
  EXPECT_THROW(tk::PartialMassTable(empty, k), tk::EmptyDensity);
  EXPECT_THROW(tk::gain_operator(random_state(6, 2, 1), tk::PartialMassTable(s, k)),
               tk::GridMismatch);
}

TEST(Step, TransportIsExactForWholeCellShiftsAndPeriodic) {
  auto s = random_state(32, 1, 3);
  s.velocities = {0.5};
  const auto initial = s.f;
  tk::StepOptions transport_only;
  transport_only.collisions = false;
  // dt = 1/16 moves 1 cell; L / v = 2 time units = 32 steps
  for (int k = 0; k < 32; ++k) tk::step(s, tk::RankKernel::constant(), 1.0 / 16.0, transport_only);
  EXPECT_LT(max_abs_diff(s.f, initial), 1e-15);
  tk::transport(s, 1.0 / 16.0);
  EXPECT_DOUBLE_EQ(s.f[1], initial[0]);
  auto back = random_state(10, 1, 2);
  back.velocities = {-0.25};
  const auto before = back.f;
  tk::transport(back, 0.2);  // half a cell to the left
  for (std::size_t m = 0; m < 10; ++m) {
    EXPECT_NEAR(back.f[m], 0.5 * before[m] + 0.5 * before[(m + 1) % 10], 1e-15);
  }
}

TEST(Step, MassPositivityAndStationarity) {
  const auto k = tk::RankKernel::smooth_cutoff(0.5, 0.25);
  for (auto scheme : {tk::CollisionScheme::ForwardEuler, tk::CollisionScheme::Exponential}) {
    for (auto split : {tk::Splitting::Lie, tk::Splitting::Strang}) {
      tk::StepOptions opt{split, scheme, true};
      auto s = tk::modulated_state(1.0, 64, {-0.7, 0.1, 1.3}, {1, 2, 1}, {0.8, -0.5, 0.3},
                                   {0.0, 2.0, 4.0});
      for (int n = 0; n < 100; ++n) {
        const double before = s.total_mass();
        tk::step(s, k, 0.05, opt);
        ASSERT_NEAR(s.total_mass(), before, 1e-12);
        ASSERT_TRUE(std::all_of(s.f.begin(), s.f.end(), [](double v) { return v >= 0.0; }));
      }
      EXPECT_NEAR(s.total_mass(), 1.0, 1e-12);

      auto h = tk::homogeneous_state(1.0, 48, {-1.1, 0.3, 0.9}, {0.2, 0.3, 0.5});
      const auto f0 = h.f;
      for (int n = 0; n < 100; ++n) tk::step(h, k, 0.037, opt);
      EXPECT_LT(max_abs_diff(h.f, f0), 1e-12);
    }
  }
}

TEST(Step, RejectsLargeSteps) {
  auto s = random_state(8, 1, 1);
  EXPECT_THROW(tk::step(s, tk::RankKernel::constant(), 1.5), tk::StepTooLarge);
  EXPECT_THROW(tk::step(s, tk::RankKernel::constant(), 0.0), tk::DomainError);
  EXPECT_NO_THROW(tk::step(s, tk::RankKernel::constant(), 1.0));
}

TEST(Solve, SingleClassAndHomogeneousMarginals) {
  const auto k = tk::RankKernel::power_law(2.0);
  tk::SolveOptions opt;
  opt.dt = 0.05;
  opt.t_end = 1.0;
  opt.sample_interval = 0.25;
  auto one = tk::modulated_state(1.0, 20, {0.3}, {}, {0.7}, {0.0});
  const auto sol = tk::solve(one, k, opt);
  ASSERT_EQ(sol.times.size(), 5u);
  EXPECT_NEAR(sol.times.back(), 1.0, 1e-15);
  for (const auto& g : sol.velocity_marginal) EXPECT_NEAR(g[0], 1.0, 1e-13);

  const auto h = tk::homogeneous_state(1.0, 20, {-1.0, 1.0}, {0.3, 0.7});
  const auto hs = tk::solve(h, k, opt);
  for (const auto& g : hs.velocity_marginal) {
    EXPECT_NEAR(g[0], 0.3, 1e-13);
    EXPECT_NEAR(g[1], 0.7, 1e-13);
  }
}

TEST(Solve, PartialFinalStepAndSampling) {
  tk::SolveOptions opt;
  opt.dt = 0.3;
  opt.t_end = 1.0;
  opt.sample_interval = 0.6;
  const auto sol = tk::solve(random_state(8, 2, 3), tk::RankKernel::constant(), opt);
  ASSERT_EQ(sol.times.size(), 3u);
  EXPECT_DOUBLE_EQ(sol.times[1], 0.6);
  EXPECT_DOUBLE_EQ(sol.times[2], 1.0);
  EXPECT_DOUBLE_EQ(sol.final_state.t, 1.0);
  opt.dt = 1.5;
  EXPECT_THROW(tk::solve(random_state(8, 2, 3), tk::RankKernel::constant(), opt), tk::StepTooLarge);
}

TEST(Solve, LieSplittingIsFirstOrder) {
  const auto k = tk::RankKernel::smooth_cutoff(0.5, 0.3);
  // v dt / dx stays an integer for every dt below, so transport is exact and
  // only the splitting error remains.
  const auto init = tk::modulated_state(1.0, 64, {-1.0, 0.0, 1.0}, {1, 1, 1}, {0.9, -0.6, 0.4},
                                        {0.0, 1.0, 2.0});
  auto run = [&](double dt) {
    tk::SolveOptions opt;
    opt.dt = dt;
    opt.t_end = 0.5;
    opt.sample_interval = 0.5;
    return tk::solve(init, k, opt).final_state.f;
  };
  const auto a = run(1.0 / 16.0);
  const auto b = run(1.0 / 32.0);
  const auto c = run(1.0 / 64.0);
  const double ratio = max_abs_diff(a, b) / max_abs_diff(b, c);
  EXPECT_GT(ratio, 1.6);
  EXPECT_LT(ratio, 2.4);
}

TEST(Solve, StrangExponentialIsSecondOrder) {
  const auto k = tk::RankKernel::smooth_cutoff(0.5, 0.3);
  const auto init = tk::modulated_state(1.0, 64, {-1.0, 0.0, 1.0}, {1, 1, 1}, {0.9, -0.6, 0.4},
                                        {0.0, 1.0, 2.0});
  auto run = [&](double dt) {
    tk::SolveOptions opt;
    opt.dt = dt;
    opt.t_end = 0.5;
    opt.sample_interval = 0.5;
    opt.step = {tk::Splitting::Strang, tk::CollisionScheme::Exponential, true};
    return tk::solve(init, k, opt).final_state.f;
  };
  const auto a = run(1.0 / 16.0);
  const auto b = run(1.0 / 32.0);
  const auto c = run(1.0 / 64.0);
  EXPECT_GT(max_abs_diff(a, b) / max_abs_diff(b, c), 3.0);
}
