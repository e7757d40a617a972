#include "topokinetic/stats.hpp"

#include <algorithm>
#include <boost/math/distributions/chi_squared.hpp>
#include <cmath>

#include "topokinetic/errors.hpp"
#include "topokinetic/summation.hpp"

namespace topokinetic {

ChiSquareResult chi_square_test(std::span<const std::uint64_t> observed,
                                std::span<const double> probabilities, double min_expected) {
  if (observed.size() != probabilities.size() || observed.empty()) {
    throw DomainError("observed and expected arrays must have the same nonzero length");
  }
  std::uint64_t total = 0;
  for (auto c : observed) total += c;
  if (total == 0) throw DomainError("no observations");

  std::vector<double> obs;
  std::vector<double> expd;
  double o = 0.0;
  double e = 0.0;
  for (std::size_t k = 0; k < observed.size(); ++k) {
    o += static_cast<double>(observed[k]);
    e += probabilities[k] * static_cast<double>(total);
    if (e >= min_expected) {
      obs.push_back(o);
      expd.push_back(e);
      o = 0.0;
      e = 0.0;
    }
  }
  if (e > 0.0 || o > 0.0) {
    if (expd.empty()) {
      obs.push_back(o);
      expd.push_back(e);
    } else {
      obs.back() += o;
      expd.back() += e;
    }
  }

  ChiSquareResult out;
  out.cells = obs.size();
  CompensatedSum stat;
  for (std::size_t k = 0; k < obs.size(); ++k) {
    if (expd[k] > 0.0) {
      const double d = obs[k] - expd[k];
      stat += d * d / expd[k];
    } else if (obs[k] > 0.0) {
      out.statistic = INFINITY;
      out.dof = obs.size() > 1 ? obs.size() - 1 : 1;
      out.p_value = 0.0;
      return out;
    }
  }
  out.statistic = stat.value();
  if (obs.size() < 2) {
    out.dof = 0;
    out.p_value = 1.0;
    return out;
  }
  out.dof = obs.size() - 1;
  const boost::math::chi_squared dist(static_cast<double>(out.dof));
  out.p_value = boost::math::cdf(boost::math::complement(dist, out.statistic));
  return out;
}

double mean(std::span<const double> xs) {
  if (xs.empty()) return 0.0;
  CompensatedSum s;
  for (double x : xs) s += x;
  return s.value() / static_cast<double>(xs.size());
}

double sample_stddev(std::span<const double> xs) {
  if (xs.size() < 2) return 0.0;
  const double m = mean(xs);
  CompensatedSum ss;
  for (double x : xs) ss += (x - m) * (x - m);
  return std::sqrt(ss.value() / static_cast<double>(xs.size() - 1));
}

double standard_error(std::span<const double> xs) {
  if (xs.size() < 2) return 0.0;
  return sample_stddev(xs) / std::sqrt(static_cast<double>(xs.size()));
}

double median(std::vector<double> xs) {
  if (xs.empty()) throw DomainError("median of an empty sample");
  std::sort(xs.begin(), xs.end());
  const std::size_t n = xs.size();
  return n % 2 == 1 ? xs[n / 2] : 0.5 * (xs[n / 2 - 1] + xs[n / 2]);
}

}  // namespace topokinetic
