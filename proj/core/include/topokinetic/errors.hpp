#pragma once

#include <stdexcept>
#include <string>

namespace topokinetic {

/// Argument outside the mathematical domain of an operation (r or p not in [0,1], ...).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// A derivative was requested from a kernel or function that does not have one.
class NonSmoothKernel : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

/// Every discrete kernel weight vanished, so no rank can be sampled.
class DegenerateKernel : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class IndexError : public std::out_of_range {
 public:
  using std::out_of_range::out_of_range;
};

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class StepTooLarge : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class EmptyDensity : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class GridMismatch : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace topokinetic
