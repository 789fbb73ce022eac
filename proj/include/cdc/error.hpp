#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace cdc {

// Malformed inputs: bad flags, out-of-range arguments, invalid JobSpec.
class UsageError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Well-formed request that cannot be realized (divisibility, budget, missing labels).
class InfeasibleError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class DivisibilityError : public InfeasibleError {
 public:
  DivisibilityError(const std::string& what, std::int64_t required_multiple, std::int64_t suggested_n)
      : InfeasibleError(what), required_multiple_(required_multiple), suggested_n_(suggested_n) {}

  std::int64_t required_multiple() const noexcept { return required_multiple_; }
  // Least N' >= the requested N that satisfies every constraint.
  std::int64_t suggested_n() const noexcept { return suggested_n_; }

 private:
  std::int64_t required_multiple_;
  std::int64_t suggested_n_;
};

// A plan/placement pair that violates a structural invariant (sender locality,
// undecodable message, invalid placement handed to an operation).
class InvalidSchemeError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

}  // namespace cdc
