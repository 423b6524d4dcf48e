#pragma once

#include <stdexcept>
#include <string>

namespace peakshaver {

/// Precondition or argument violation (bad lengths, out-of-range powers, ...).
class DomainError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Least-squares fit could not be performed (degenerate design matrix).
class FitError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ClassificationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Invalid configuration document or flag combination.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed input file. The message names the offending row/column.
class IngestError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Closed-loop run aborted, e.g. the solver reported an infeasible problem.
class SimulationError : public std::runtime_error {
 public:
  SimulationError(const std::string& what, int step, std::string problem_dump = {})
      : std::runtime_error(what), step_(step), problem_dump_(std::move(problem_dump)) {}

  int step() const { return step_; }
  const std::string& problem_dump() const { return problem_dump_; }

 private:
  int step_;
  std::string problem_dump_;
};

/// Broken internal invariant; indicates a bug rather than bad input.
class InternalError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

}  // namespace peakshaver
