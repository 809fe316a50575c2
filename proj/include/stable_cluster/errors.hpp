#pragma once

#include <stdexcept>
#include <string>

namespace stable_cluster {

// Bad arguments: out-of-range epsilon, k < 1, dimension mismatch.
class ParameterError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Well-formed request with no solution, e.g. k > n.
class InfeasibleError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Size or combinatorial guard tripped.
class BudgetError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class UnsupportedEngineError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace stable_cluster
