#pragma once

#include <stdexcept>
#include <string>

namespace qdc {

// Bad input to an operation: out-of-range angle, wrong dimension, unknown kind.
class InvalidArgument : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// A setting where a conditional probability has a vanishing denominator
// (only epsilon = 1, alpha = 0 for the ancilla marginal p1).
class DegenerateSetting : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// No A = 1 events were recorded at some phase point.
class InsufficientStatistics : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// classify() was handed parameters whose residual exceeds the tolerance.
class NotASolution : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

}  // namespace qdc
