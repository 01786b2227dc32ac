#pragma once

#include <stdexcept>
#include <string>

namespace pco {

// A map was evaluated outside the region where it is defined.
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// Construction parameters outside the admissible range.
class ParameterError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// An iterative solver ran out of iterations. Distinct from a certified
// "no solution" result.
class NonConvergence : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Closed-form and numeric rise-function classification disagree.
class ClassificationConflict : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// The event-driven loop could not make progress (livelock guard, broken
// section invariant).
class SimulationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace pco
