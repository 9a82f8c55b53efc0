#pragma once

#include <stdexcept>
#include <string>

namespace phi4 {

/// Invalid run configuration (CLI exit code 2).
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Non-finite or exploding state during time stepping (CLI exit code 3).
class BlowUpError : public std::runtime_error {
 public:
  BlowUpError(const std::string& what, double t)
      : std::runtime_error(what), time_(t) {}
  double time() const noexcept { return time_; }

 private:
  double time_;
};

/// A requested lattice sum exceeds the configured work budget.
class BudgetError : public std::runtime_error {
 public:
  BudgetError(const std::string& what, double estimated_terms)
      : std::runtime_error(what), estimated_terms_(estimated_terms) {}
  double estimated_terms() const noexcept { return estimated_terms_; }

 private:
  double estimated_terms_;
};

}  // namespace phi4
