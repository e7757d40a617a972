#include "topokinetic/kernel.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "topokinetic/errors.hpp"
#include "topokinetic/summation.hpp"

namespace topokinetic {
namespace {

// Septic smoothstep: P(0)=0, P(1)=1, first three derivatives vanish at both ends.
double smoothstep(double u) {
  const double u4 = u * u * u * u;
  return u4 * (35.0 + u * (-84.0 + u * (70.0 - 20.0 * u)));
}

double smoothstep_d1(double u) {
  const double w = u * (1.0 - u);
  return 140.0 * w * w * w;
}

double smoothstep_d2(double u) {
  const double w = u * (1.0 - u);
  return 420.0 * w * w * (1.0 - 2.0 * u);
}

// Integral of P from 0 to u.
double smoothstep_integral(double u) {
  const double u5 = u * u * u * u * u;
  return u5 * (7.0 + u * (-14.0 + u * (10.0 - 2.5 * u)));
}

// Unnormalized smooth-cutoff antiderivative: integral of 1 - P over [0, r].
double smooth_profile_integral(double r, double theta, double eps) {
  const double start = theta - eps;
  const double width = 2.0 * eps;
  if (r <= start) return r;
  if (r >= start + width) return theta;
  const double u = (r - start) / width;
  return start + width * (u - smoothstep_integral(u));
}

constexpr double kCutoffSlack = 1e-14;

}  // namespace

RankKernel::RankKernel(KernelFamily family, double theta, double eps, double alpha, bool mirrored)
    : family_(family), theta_(theta), eps_(eps), alpha_(alpha), mirrored_(mirrored),
      normalizer_(1.0) {}

RankKernel RankKernel::constant() { return RankKernel(KernelFamily::Constant, 1.0, 0.0, 0.0, false); }

RankKernel RankKernel::uniform_cutoff(double theta) {
  if (!(theta > 0.0 && theta <= 1.0)) {
    throw DomainError("uniform cutoff requires theta in (0,1]");
  }
  return RankKernel(KernelFamily::UniformCutoff, theta, 0.0, 0.0, false);
}

RankKernel RankKernel::smooth_cutoff(double theta, double eps) {
  if (!(theta > 0.0 && theta <= 1.0)) {
    throw DomainError("smooth cutoff requires theta in (0,1]");
  }
  if (!(eps > 0.0 && eps <= theta)) {
    throw DomainError("smooth cutoff requires eps in (0, theta]");
  }
  RankKernel k(KernelFamily::SmoothCutoff, theta, eps, 0.0, false);
  k.normalizer_ = smooth_profile_integral(1.0, theta, eps);
  return k;
}

RankKernel RankKernel::power_law(double alpha, bool mirrored) {
  if (!(alpha >= 0.0) || !std::isfinite(alpha)) {
    throw DomainError("power law requires a finite alpha >= 0");
  }
  return RankKernel(KernelFamily::PowerLaw, 1.0, 0.0, alpha, mirrored);
}

bool RankKernel::smooth() const {
  switch (family_) {
    case KernelFamily::Constant:
    case KernelFamily::SmoothCutoff:
      return true;
    case KernelFamily::UniformCutoff:
      return false;
    case KernelFamily::PowerLaw:
      return alpha_ == 0.0 || alpha_ == 1.0 || alpha_ >= 2.0;
  }
  return false;
}

double RankKernel::eval(double r, KernelOrder order) const {
  if (!(r >= 0.0 && r <= 1.0)) {
    std::ostringstream msg;
    msg << "kernel argument " << r << " outside [0,1]";
    throw DomainError(msg.str());
  }
  switch (family_) {
    case KernelFamily::Constant:
      switch (order) {
        case KernelOrder::Value: return 1.0;
        case KernelOrder::Antiderivative: return r;
        default: return 0.0;
      }
    case KernelFamily::UniformCutoff:
      switch (order) {
        case KernelOrder::Value: return r <= theta_ + kCutoffSlack ? 1.0 / theta_ : 0.0;
        case KernelOrder::Antiderivative: return std::min(r, theta_) / theta_;
        default: throw NonSmoothKernel("uniform cutoff kernel has no derivatives");
      }
    case KernelFamily::SmoothCutoff:
      return eval_smooth_cutoff(r, order);
    case KernelFamily::PowerLaw:
      return eval_power_law(r, order);
  }
  return 0.0;
}

double RankKernel::eval_smooth_cutoff(double r, KernelOrder order) const {
  if (order == KernelOrder::Antiderivative) {
    if (r == 1.0) return 1.0;
    return smooth_profile_integral(r, theta_, eps_) / normalizer_;
  }
  const double start = theta_ - eps_;
  const double width = 2.0 * eps_;
  if (r <= start) return order == KernelOrder::Value ? 1.0 / normalizer_ : 0.0;
  if (r >= start + width) return 0.0;
  const double u = (r - start) / width;
  switch (order) {
    case KernelOrder::Value: return (1.0 - smoothstep(u)) / normalizer_;
    case KernelOrder::FirstDerivative: return -smoothstep_d1(u) / (width * normalizer_);
    case KernelOrder::SecondDerivative:
      return -smoothstep_d2(u) / (width * width * normalizer_);
    default: return 0.0;
  }
}

double RankKernel::eval_power_law(double r, KernelOrder order) const {
  // s is the distance to the vanishing end of the kernel.
  const double s = mirrored_ ? r : 1.0 - r;
  const double sign = mirrored_ ? 1.0 : -1.0;
  const double a = alpha_;
  switch (order) {
    case KernelOrder::Value:
      return (a + 1.0) * std::pow(s, a);
    case KernelOrder::Antiderivative:
      return mirrored_ ? std::pow(r, a + 1.0) : 1.0 - std::pow(s, a + 1.0);
    case KernelOrder::FirstDerivative: {
      const double c = a * (a + 1.0);
      if (c == 0.0) return 0.0;
      if (s == 0.0 && a < 1.0) throw NonSmoothKernel("power law derivative undefined at endpoint");
      return sign * c * std::pow(s, a - 1.0);
    }
    case KernelOrder::SecondDerivative: {
      const double c = a * (a - 1.0) * (a + 1.0);
      if (c == 0.0) return 0.0;
      if (s == 0.0 && a < 2.0) {
        throw NonSmoothKernel("power law second derivative undefined at endpoint");
      }
      return c * std::pow(s, a - 2.0);
    }
  }
  return 0.0;
}

std::string RankKernel::describe() const {
  std::ostringstream out;
  switch (family_) {
    case KernelFamily::Constant: out << "constant"; break;
    case KernelFamily::UniformCutoff: out << "uniformcutoff(theta=" << theta_ << ")"; break;
    case KernelFamily::SmoothCutoff:
      out << "smoothcutoff(theta=" << theta_ << ";eps=" << eps_ << ")";
      break;
    case KernelFamily::PowerLaw:
      out << "powerlaw(alpha=" << alpha_ << (mirrored_ ? ";mirrored" : "") << ")";
      break;
  }
  return out.str();
}

double eval_kernel(const RankKernel& kernel, double r, KernelOrder order) {
  return kernel.eval(r, order);
}

DiscreteKernelTable build_discrete_table(const RankKernel& kernel, std::size_t n) {
  if (n < 2) throw DomainError("discrete kernel table needs at least two particles");
  DiscreteKernelTable table;
  table.n = n;
  const std::size_t ranks = n - 1;
  const auto denom = static_cast<double>(ranks);

  table.weights.resize(ranks);
  CompensatedSum total;
  for (std::size_t k = 1; k <= ranks; ++k) {
    const double w = kernel.value(static_cast<double>(k) / denom);
    table.weights[k - 1] = w;
    total += w;
  }
  const double sum = total.value();
  if (!(sum > 0.0)) {
    throw DegenerateKernel("kernel " + kernel.describe() + " vanishes on every rank for N=" +
                           std::to_string(n));
  }
  table.s_n = sum / denom;

  table.cdf.resize(ranks);
  CompensatedSum running;
  for (std::size_t k = 0; k < ranks; ++k) {
    table.weights[k] /= sum;
    running += table.weights[k];
    table.cdf[k] = running.value();
  }
  const double last = table.cdf.back();
  for (double& c : table.cdf) c = std::min(1.0, c / last);
  table.cdf.back() = 1.0;
  return table;
}

std::size_t sample_rank(const DiscreteKernelTable& table, double u) {
  const auto it = std::upper_bound(table.cdf.begin(), table.cdf.end(), u);
  if (it != table.cdf.end()) return static_cast<std::size_t>(it - table.cdf.begin()) + 1;
  // u >= 1 cannot come from uniform01; fall back to the last rank carrying weight.
  std::size_t k = table.weights.size();
  while (k > 1 && table.weights[k - 1] == 0.0) --k;
  return k;
}

}  // namespace topokinetic
