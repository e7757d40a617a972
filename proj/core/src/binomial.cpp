#include "topokinetic/binomial.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "topokinetic/errors.hpp"
#include "topokinetic/summation.hpp"

namespace topokinetic {

std::vector<double> binomial_pmf(std::size_t n, double p) {
  if (!(p >= 0.0 && p <= 1.0)) {
    throw DomainError("binomial probability must lie in [0,1], got " + std::to_string(p));
  }
  std::vector<double> w(n + 1, 0.0);
  if (p == 0.0) {
    w.front() = 1.0;
    return w;
  }
  if (p == 1.0) {
    w.back() = 1.0;
    return w;
  }

  const auto mode = std::min<std::size_t>(
      n, static_cast<std::size_t>(std::floor(static_cast<double>(n + 1) * p)));
  const double odds = p / (1.0 - p);
  const double inverse_odds = (1.0 - p) / p;

  w[mode] = 1.0;
  for (std::size_t k = mode + 1; k <= n; ++k) {
    w[k] = w[k - 1] * (static_cast<double>(n - k + 1) / static_cast<double>(k)) * odds;
  }
  for (std::size_t k = mode; k-- > 0;) {
    w[k] = w[k + 1] * (static_cast<double>(k + 1) / static_cast<double>(n - k)) * inverse_odds;
  }

  CompensatedSum total;
  for (double x : w) total += x;
  const double norm = total.value();
  for (double& x : w) x /= norm;
  return w;
}

}  // namespace topokinetic
