#pragma once

#include <cstddef>
#include <vector>

namespace topokinetic {

/// Binomial(n, p) probabilities for k = 0..n.
///
/// Terms are generated by the ratio recurrence outward from the mode and then
/// normalized, which keeps relative accuracy near machine precision for n up
/// to 1e5 without forming binomial coefficients. Throws DomainError if p is
/// not in [0,1].
std::vector<double> binomial_pmf(std::size_t n, double p);

}  // namespace topokinetic
