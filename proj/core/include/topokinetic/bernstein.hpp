#pragma once

#include <cstddef>
#include <functional>
#include <string>
#include <utility>

#include "topokinetic/kernel.hpp"

namespace topokinetic {

/// Real function on [0,1] with an optional exact second derivative.
struct RealFunction {
  std::string name;
  std::function<double(double)> value;
  std::function<double(double)> second_derivative;  // empty if not C^2
};

/// View of a rank kernel as a RealFunction (second derivative only if smooth).
RealFunction as_function(const RankKernel& kernel);

/// One row of an asymptotic-expansion comparison: an exactly computed sum
/// (lhs) against its leading term and its first-order corrected expansion.
struct ExpansionReport {
  std::string check;
  std::string subject;
  double point = 0.0;  // x or p; NaN when not applicable
  std::size_t size = 0;
  double lhs = 0.0;
  double leading = 0.0;
  double corrected = 0.0;
  double residual_leading = 0.0;
  double residual_corrected = 0.0;
};

/// B_n(f;x) = sum_i f(i/n) C(n,i) x^i (1-x)^(n-i), with compensated summation.
/// Throws DomainError if x is outside [0,1] or n == 0.
double bernstein_eval(const std::function<double(double)>& f, std::size_t n, double x);

/// Compares B_n(f;x) with f(x) + x(1-x) f''(x) / (2n).
/// Throws NonSmoothKernel if f has no second derivative.
ExpansionReport lorentz_expansion_check(const RealFunction& f, double x, std::size_t n);

/// The index shifts (a, b) for which sum_R K((R+a)/(M+b)) Binom(M,p)(R) is
/// needed: (0,0) is the plain Bernstein polynomial, (1,1) the law of the rank
/// of particle 2 seen from particle 1, (2,2) and (1,2) the rank of particle 3
/// seen from particle 2 when particle 1 is inside or outside that ball.
enum class BinomialShift { None, PairRank, InsideBall, OutsideBall };

std::pair<int, int> shift_offsets(BinomialShift shift);

double shifted_binomial_expectation(const std::function<double(double)>& f, double p,
                                    std::size_t m, BinomialShift shift);
double shifted_binomial_expectation(const RankKernel& kernel, double p, std::size_t m,
                                    BinomialShift shift);

enum class BallCase { InsideBall, OutsideBall };

/// Exact shifted sum with M = N - 3 against
/// K(p) + 2(1-p)K'(p)/N + p(1-p)K''(p)/(2N), minus K'(p)/N outside the ball.
/// Requires a smooth kernel and N >= 4.
ExpansionReport lemma_expansion_check(const RankKernel& kernel, double p, std::size_t n,
                                      BallCase ball);

/// S^N(K) against 1 + (K(1) - K(0)) / (2N).
ExpansionReport sn_expansion_check(const RankKernel& kernel, std::size_t n);

/// Residuals at or below this level are treated as exact; the sums carry
/// roundoff of a few ulps of their O(1) terms.
inline constexpr double kResidualFloor = 1e-13;

struct LadderVerdict {
  bool decays = false;
  double scaled_small = 0.0;  // size * residual_corrected at the smaller size
  double scaled_large = 0.0;
};

/// o(1/n) check on two sizes: size * residual_corrected must shrink by at
/// least `factor`, unless the larger-size residual is already at roundoff.
LadderVerdict residual_ladder(const ExpansionReport& small, const ExpansionReport& large,
                              double factor = 2.0);

}  // namespace topokinetic
