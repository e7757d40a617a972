#include <gtest/gtest.h>

#include <boost/math/quadrature/tanh_sinh.hpp>
#include <cmath>
#include <random>
#include <vector>

#include "topokinetic/errors.hpp"
#include "topokinetic/kernel.hpp"
#include "topokinetic/random.hpp"
#include "topokinetic/stats.hpp"

namespace tk = topokinetic;

namespace {

// Adaptive tanh-sinh integral of K over [0,1], split where K has kinks.
double kernel_integral(const tk::RankKernel& k) {
  boost::math::quadrature::tanh_sinh<double> q;
  auto f = [&](double r) { return k.value(r); };
  std::vector<double> nodes{0.0};
  if (k.family() == tk::KernelFamily::UniformCutoff && k.theta() < 1.0) nodes.push_back(k.theta());
  if (k.family() == tk::KernelFamily::SmoothCutoff) {
    for (double p : {k.theta() - k.eps(), k.theta() + k.eps()}) {
      if (p > 0.0 && p < 1.0) nodes.push_back(p);
    }
  }
  nodes.push_back(1.0);
  double total = 0.0;
  for (std::size_t i = 0; i + 1 < nodes.size(); ++i) {
    total += q.integrate(f, nodes[i], nodes[i + 1], 1e-15);
  }
  return total;
}

std::vector<tk::RankKernel> random_kernels(std::uint64_t seed) {
  tk::Engine eng(seed);
  std::vector<tk::RankKernel> out{tk::RankKernel::constant()};
  for (int i = 0; i < 10; ++i) {
    const double theta = 0.05 + 0.95 * tk::uniform01(eng);
    out.push_back(tk::RankKernel::uniform_cutoff(theta));
    out.push_back(tk::RankKernel::smooth_cutoff(theta, theta * (0.05 + 0.95 * tk::uniform01(eng))));
    const double alpha = 4.0 * tk::uniform01(eng);
    out.push_back(tk::RankKernel::power_law(alpha, false));
    out.push_back(tk::RankKernel::power_law(alpha, true));
  }
  return out;
}

}  // namespace

TEST(Kernel, SpecExamples) {
  EXPECT_EQ(tk::eval_kernel(tk::RankKernel::constant(), 0.3), 1.0);
  EXPECT_EQ(tk::eval_kernel(tk::RankKernel::constant(), 0.7, tk::KernelOrder::Antiderivative), 0.7);
  EXPECT_DOUBLE_EQ(tk::eval_kernel(tk::RankKernel::power_law(1.0), 0.25), 1.5);
}

TEST(Kernel, NormalizedNonnegativeWithMonotoneAntiderivative) {
  for (const auto& k : random_kernels(11)) {
    SCOPED_TRACE(k.describe());
    EXPECT_NEAR(kernel_integral(k), 1.0, 1e-12);
    EXPECT_EQ(k.antiderivative(0.0), 0.0);
    EXPECT_NEAR(k.antiderivative(1.0), 1.0, 1e-15);
    double previous = 0.0;
    for (int i = 0; i <= 200; ++i) {
      const double r = i / 200.0;
      EXPECT_GE(k.value(r), 0.0);
      const double a = k.antiderivative(r);
      EXPECT_GE(a, previous - 1e-15);
      previous = a;
    }
  }
}

TEST(Kernel, AntiderivativeMatchesQuadrature) {
  boost::math::quadrature::tanh_sinh<double> q;
  const auto k = tk::RankKernel::smooth_cutoff(0.4, 0.15);
  for (double r : {0.1, 0.25, 0.3, 0.4, 0.5, 0.54, 0.9}) {
    double lo = 0.0;
    double total = 0.0;
    for (double p : {0.25, 0.55, r}) {
      const double hi = std::min(p, r);
      if (hi > lo) total += q.integrate([&](double s) { return k.value(s); }, lo, hi, 1e-15);
      lo = std::max(lo, hi);
    }
    EXPECT_NEAR(k.antiderivative(r), total, 1e-13) << r;
  }
}

TEST(Kernel, DerivativesMatchFiniteDifferences) {
  for (const auto& k : {tk::RankKernel::smooth_cutoff(0.5, 0.2), tk::RankKernel::power_law(3.0),
                        tk::RankKernel::power_law(2.5, true), tk::RankKernel::constant()}) {
    SCOPED_TRACE(k.describe());
    ASSERT_TRUE(k.smooth());
    for (double r : {0.05, 0.31, 0.42, 0.5, 0.66, 0.9}) {
      const double h = 1e-5;
      const double d1 = (k.value(r + h) - k.value(r - h)) / (2 * h);
      const double d2 = (k.derivative(r + h) - k.derivative(r - h)) / (2 * h);
      EXPECT_NEAR(k.derivative(r), d1, 1e-6 * (1 + std::abs(d1)));
      EXPECT_NEAR(k.second_derivative(r), d2, 1e-5 * (1 + std::abs(d2)));
    }
  }
}

TEST(Kernel, SmoothCutoffIsC2AtJunctions) {
  const auto k = tk::RankKernel::smooth_cutoff(0.5, 0.2);
  for (double p : {0.3, 0.7}) {
    EXPECT_NEAR(k.value(p - 1e-9), k.value(p + 1e-9), 1e-7);
    EXPECT_NEAR(k.derivative(p - 1e-9), k.derivative(p + 1e-9), 1e-6);
    EXPECT_NEAR(k.second_derivative(p), 0.0, 1e-12);
  }
}

TEST(Kernel, Errors) {
  const auto cut = tk::RankKernel::uniform_cutoff(0.3);
  EXPECT_FALSE(cut.smooth());
  EXPECT_THROW((void)cut.derivative(0.1), tk::NonSmoothKernel);
  EXPECT_THROW((void)cut.value(1.2), tk::DomainError);
  EXPECT_THROW((void)cut.value(-0.01), tk::DomainError);
  EXPECT_THROW(tk::RankKernel::uniform_cutoff(0.0), tk::DomainError);
  EXPECT_THROW(tk::RankKernel::smooth_cutoff(0.5, 0.6), tk::DomainError);
  EXPECT_THROW(tk::RankKernel::power_law(-1.0), tk::DomainError);
  const auto sqrt_law = tk::RankKernel::power_law(0.5);
  EXPECT_FALSE(sqrt_law.smooth());
  EXPECT_THROW((void)sqrt_law.derivative(1.0), tk::NonSmoothKernel);
  EXPECT_NO_THROW((void)sqrt_law.derivative(0.5));
}

TEST(DiscreteTable, SpecExamples) {
  const auto c = tk::build_discrete_table(tk::RankKernel::constant(), 5);
  EXPECT_EQ(c.s_n, 1.0);
  for (double w : c.weights) EXPECT_DOUBLE_EQ(w, 0.25);

  const auto lin = tk::build_discrete_table(tk::RankKernel::power_law(1.0, true), 5);
  EXPECT_DOUBLE_EQ(lin.s_n, 1.25);
  for (std::size_t k = 1; k <= 4; ++k) EXPECT_DOUBLE_EQ(lin.weight(k), k / 10.0);

  const auto cut = tk::build_discrete_table(tk::RankKernel::uniform_cutoff(0.5), 3);
  EXPECT_EQ(cut.weight(1), 1.0);
  EXPECT_EQ(cut.weight(2), 0.0);
}

TEST(DiscreteTable, Invariants) {
  for (const auto& k : random_kernels(5)) {
    for (std::size_t n : {2u, 3u, 10u, 101u, 5000u}) {
      tk::DiscreteKernelTable t;
      try {
        t = tk::build_discrete_table(k, n);
      } catch (const tk::DegenerateKernel&) {
        continue;
      }
      long double sum = 0.0L;
      for (double w : t.weights) sum += w;
      EXPECT_NEAR(static_cast<double>(sum), 1.0, 1e-14);
      EXPECT_EQ(t.cdf.back(), 1.0);
      for (std::size_t r = 1; r <= t.max_rank(); ++r) {
        const double expected = k.value(r / static_cast<double>(n - 1)) / ((n - 1) * t.s_n);
        EXPECT_NEAR(t.weight(r), expected, 1e-15 + 1e-13 * expected);
      }
    }
  }
}

TEST(DiscreteTable, SnApproachesOneAtRateOneOverN) {
  for (const auto& k : {tk::RankKernel::smooth_cutoff(0.5, 0.2), tk::RankKernel::power_law(2.0),
                        tk::RankKernel::power_law(3.0, true)}) {
    double previous = INFINITY;
    for (std::size_t n : {10u, 100u, 1000u, 10000u}) {
      const double gap = std::abs(tk::build_discrete_table(k, n).s_n - 1.0);
      EXPECT_LE(gap * n, 4.0) << k.describe();
      EXPECT_LT(gap, previous);
      previous = gap;
    }
  }
}

TEST(DiscreteTable, Errors) {
  EXPECT_THROW(tk::build_discrete_table(tk::RankKernel::constant(), 1), tk::DomainError);
  EXPECT_THROW(tk::build_discrete_table(tk::RankKernel::uniform_cutoff(0.2), 3), tk::DegenerateKernel);
}

TEST(SampleRank, SpecExamples) {
  const auto c = tk::build_discrete_table(tk::RankKernel::constant(), 5);
  EXPECT_EQ(tk::sample_rank(c, 0.0), 1u);
  EXPECT_EQ(tk::sample_rank(c, 0.99), 4u);
  const auto cut = tk::build_discrete_table(tk::RankKernel::uniform_cutoff(0.5), 3);
  EXPECT_EQ(tk::sample_rank(cut, 0.5), 1u);
  EXPECT_EQ(tk::sample_rank(cut, 0.999999), 1u);
}

TEST(SampleRank, ChiSquareAgainstWeights) {
  const auto t = tk::build_discrete_table(tk::RankKernel::smooth_cutoff(0.6, 0.3), 40);
  tk::Engine eng(2024);
  std::vector<std::uint64_t> counts(t.max_rank(), 0);
  for (int i = 0; i < 1000000; ++i) ++counts[tk::sample_rank(t, tk::uniform01(eng)) - 1];
  const auto res = tk::chi_square_test(counts, t.weights);
  EXPECT_GT(res.p_value, 0.001) << res.statistic << " dof " << res.dof;
}
