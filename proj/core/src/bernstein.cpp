#include "topokinetic/bernstein.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "topokinetic/binomial.hpp"
#include "topokinetic/errors.hpp"
#include "topokinetic/summation.hpp"

namespace topokinetic {

RealFunction as_function(const RankKernel& kernel) {
  RealFunction f;
  f.name = kernel.describe();
  f.value = [kernel](double r) { return kernel.value(r); };
  if (kernel.smooth()) {
    f.second_derivative = [kernel](double r) { return kernel.second_derivative(r); };
  }
  return f;
}

std::pair<int, int> shift_offsets(BinomialShift shift) {
  switch (shift) {
    case BinomialShift::None: return {0, 0};
    case BinomialShift::PairRank: return {1, 1};
    case BinomialShift::InsideBall: return {2, 2};
    case BinomialShift::OutsideBall: return {1, 2};
  }
  return {0, 0};
}

double shifted_binomial_expectation(const std::function<double(double)>& f, double p,
                                    std::size_t m, BinomialShift shift) {
  if (!(p >= 0.0 && p <= 1.0)) throw DomainError("p must lie in [0,1]");
  const auto [a, b] = shift_offsets(shift);
  if (m == 0 && b == 0) throw DomainError("Bernstein degree must be at least 1");
  const std::vector<double> w = binomial_pmf(m, p);
  const double denom = static_cast<double>(m) + b;
  CompensatedSum sum;
  for (std::size_t r = 0; r <= m; ++r) {
    if (w[r] == 0.0) continue;
    const std::size_t num = r + static_cast<std::size_t>(a);
    const double point = static_cast<double>(num) == denom ? 1.0 : static_cast<double>(num) / denom;
    sum += w[r] * f(point);
  }
  return sum.value();
}

double shifted_binomial_expectation(const RankKernel& kernel, double p, std::size_t m,
                                    BinomialShift shift) {
  return shifted_binomial_expectation([&kernel](double r) { return kernel.value(r); }, p, m,
                                      shift);
}

double bernstein_eval(const std::function<double(double)>& f, std::size_t n, double x) {
  if (n == 0) throw DomainError("Bernstein degree must be at least 1");
  if (!(x >= 0.0 && x <= 1.0)) throw DomainError("Bernstein point must lie in [0,1]");
  return shifted_binomial_expectation(f, x, n, BinomialShift::None);
}

namespace {

ExpansionReport finish(ExpansionReport r) {
  r.residual_leading = std::abs(r.lhs - r.leading);
  r.residual_corrected = std::abs(r.lhs - r.corrected);
  return r;
}

}  // namespace

ExpansionReport lorentz_expansion_check(const RealFunction& f, double x, std::size_t n) {
  if (!f.second_derivative) {
    throw NonSmoothKernel("function " + f.name + " has no second derivative");
  }
  ExpansionReport r;
  r.check = "bernstein";
  r.subject = f.name;
  r.point = x;
  r.size = n;
  r.lhs = bernstein_eval(f.value, n, x);
  r.leading = f.value(x);
  r.corrected = r.leading + x * (1.0 - x) * f.second_derivative(x) / (2.0 * static_cast<double>(n));
  return finish(r);
}

ExpansionReport lemma_expansion_check(const RankKernel& kernel, double p, std::size_t n,
                                      BallCase ball) {
  if (!kernel.smooth()) {
    throw NonSmoothKernel("expansion needs a C^2 kernel, got " + kernel.describe());
  }
  if (n < 4) throw DomainError("lemma expansion needs N >= 4");
  if (!(p >= 0.0 && p <= 1.0)) throw DomainError("p must lie in [0,1]");
  const auto big_n = static_cast<double>(n);
  const double k0 = kernel.value(p);
  const double k1 = kernel.derivative(p);
  const double k2 = kernel.second_derivative(p);

  ExpansionReport r;
  r.check = ball == BallCase::InsideBall ? "lemma_inside" : "lemma_outside";
  r.subject = kernel.describe();
  r.point = p;
  r.size = n;
  r.lhs = shifted_binomial_expectation(
      kernel, p, n - 3,
      ball == BallCase::InsideBall ? BinomialShift::InsideBall : BinomialShift::OutsideBall);
  r.leading = k0;
  r.corrected = k0 + 2.0 * (1.0 - p) * k1 / big_n + p * (1.0 - p) * k2 / (2.0 * big_n);
  if (ball == BallCase::OutsideBall) r.corrected -= k1 / big_n;
  return finish(r);
}

ExpansionReport sn_expansion_check(const RankKernel& kernel, std::size_t n) {
  ExpansionReport r;
  r.check = "sn";
  r.subject = kernel.describe();
  r.point = std::numeric_limits<double>::quiet_NaN();
  r.size = n;
  r.lhs = build_discrete_table(kernel, n).s_n;
  r.leading = 1.0;
  r.corrected = 1.0 + (kernel.value(1.0) - kernel.value(0.0)) / (2.0 * static_cast<double>(n));
  return finish(r);
}

LadderVerdict residual_ladder(const ExpansionReport& small, const ExpansionReport& large,
                              double factor) {
  LadderVerdict v;
  v.scaled_small = static_cast<double>(small.size) * small.residual_corrected;
  v.scaled_large = static_cast<double>(large.size) * large.residual_corrected;
  v.decays = large.residual_corrected <= kResidualFloor || v.scaled_large * factor <= v.scaled_small;
  return v;
}

}  // namespace topokinetic
