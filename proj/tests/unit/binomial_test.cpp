#include <gtest/gtest.h>

#include <cmath>
#include <numeric>

#include "topokinetic/binomial.hpp"
#include "topokinetic/errors.hpp"

namespace tk = topokinetic;

namespace {

// Direct product form in long double; independent of the recurrence.
long double direct_pmf(unsigned n, unsigned k, long double p) {
  long double c = 1.0L;
  for (unsigned i = 1; i <= k; ++i) c = c * (n - k + i) / i;
  return c * std::pow(p, static_cast<long double>(k)) *
         std::pow(1.0L - p, static_cast<long double>(n - k));
}

}  // namespace

TEST(Binomial, MatchesDirectFormulaForSmallN) {
  for (unsigned n : {1u, 2u, 5u, 17u, 40u}) {
    for (double p : {0.03, 0.25, 0.5, 0.71, 0.999}) {
      const auto pmf = tk::binomial_pmf(n, p);
      ASSERT_EQ(pmf.size(), n + 1);
      for (unsigned k = 0; k <= n; ++k) {
        const double expected = static_cast<double>(direct_pmf(n, k, p));
        EXPECT_NEAR(pmf[k], expected, 1e-15 + 1e-12 * expected) << "n=" << n << " p=" << p << " k=" << k;
      }
    }
  }
}

TEST(Binomial, DegenerateProbabilities) {
  const auto zero = tk::binomial_pmf(6, 0.0);
  EXPECT_EQ(zero[0], 1.0);
  EXPECT_EQ(std::accumulate(zero.begin() + 1, zero.end(), 0.0), 0.0);
  const auto one = tk::binomial_pmf(6, 1.0);
  EXPECT_EQ(one[6], 1.0);
  EXPECT_EQ(tk::binomial_pmf(0, 0.3).size(), 1u);
}

TEST(Binomial, RejectsOutOfRangeP) {
  EXPECT_THROW(tk::binomial_pmf(4, -0.1), tk::DomainError);
  EXPECT_THROW(tk::binomial_pmf(4, 1.5), tk::DomainError);
  EXPECT_THROW(tk::binomial_pmf(4, std::nan("")), tk::DomainError);
}

TEST(Binomial, LargeNMomentsStayAccurate) {
  const std::size_t n = 100000;
  const double p = 0.37;
  const auto pmf = tk::binomial_pmf(n, p);
  long double total = 0, mean = 0, second = 0;
  for (std::size_t k = 0; k <= n; ++k) {
    total += pmf[k];
    mean += pmf[k] * static_cast<long double>(k);
    second += pmf[k] * static_cast<long double>(k) * static_cast<long double>(k);
  }
  EXPECT_NEAR(static_cast<double>(total), 1.0, 1e-13);
  EXPECT_NEAR(static_cast<double>(mean), n * p, 1e-8 * n);
  const double var = static_cast<double>(second - mean * mean);
  EXPECT_NEAR(var, n * p * (1 - p), 1e-6 * n);
}
