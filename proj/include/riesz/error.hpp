#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace riesz {

// Invalid input values (dimension, exponents, sizes).
class ParameterError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// The (d, beta, sigma) regime does not admit the requested functional.
// what() names the inequality that failed.
class RegimeError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// A tabulated quantity was queried outside its mesh.
class RangeError : public std::out_of_range {
 public:
  using std::out_of_range::out_of_range;
};

class ResolutionError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class CoverageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class WindowError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class ConvergenceError : public std::runtime_error {
 public:
  ConvergenceError(const std::string& what, std::vector<double> trace)
      : std::runtime_error(what), trace_(std::move(trace)) {}
  const std::vector<double>& trace() const noexcept { return trace_; }

 private:
  std::vector<double> trace_;
};

// Raised by the replica harness; wraps the sampler failure with its index.
class ReplicaError : public std::runtime_error {
 public:
  ReplicaError(std::size_t replica, const std::string& what)
      : std::runtime_error("replica " + std::to_string(replica) + ": " + what),
        replica_(replica) {}
  std::size_t replica() const noexcept { return replica_; }

 private:
  std::size_t replica_;
};

}  // namespace riesz
