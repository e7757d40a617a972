#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace topokinetic {

struct ChiSquareResult {
  double statistic = 0.0;
  std::size_t dof = 0;
  double p_value = 1.0;
  std::size_t cells = 0;  // cells after pooling
};

/// Pearson goodness-of-fit of observed counts against probabilities.
/// Adjacent cells are pooled left to right until every pooled cell expects at
/// least `min_expected` observations; a short remainder joins the last cell.
ChiSquareResult chi_square_test(std::span<const std::uint64_t> observed,
                                std::span<const double> probabilities, double min_expected = 5.0);

double mean(std::span<const double> xs);
/// Sample standard deviation (n - 1 denominator); 0 for fewer than two values.
double sample_stddev(std::span<const double> xs);
double standard_error(std::span<const double> xs);
double median(std::vector<double> xs);

}  // namespace topokinetic
