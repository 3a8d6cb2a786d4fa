#pragma once

#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace polycap {

/// Malformed input: wrong vector sizes, schema violations, bad flags.
class InputError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// The Jacobian (or a projected row of it) does not have full row rank.
/// Carries the singular values that triggered the refusal.
class RankDeficientError : public std::runtime_error {
public:
  RankDeficientError(const std::string& what, std::vector<double> singular_values)
      : std::runtime_error(what), singular_values_(std::move(singular_values)) {}

  const std::vector<double>& singular_values() const { return singular_values_; }

private:
  std::vector<double> singular_values_;
};

/// A requested computation exceeds a hard capacity limit, or a capacity
/// needed by a policy is exhausted.
class CapacityError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Geometric query on a degenerate (flat) polytope that has no halfspace form.
class DegenerateError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

}  // namespace polycap
