#pragma once

#include <stdexcept>
#include <string>

namespace mixlab {

enum class ErrorKind {
  index,
  parameter,
  solver_failure,
  not_summable,
  not_mixing,
  degenerate,
  optimization,
  empty_witness,
  model,
  precondition,
  parse,
  schema,
  invariant,
};

const char* to_string(ErrorKind kind);

/// Base of every exception thrown by the library. The kind drives the
/// CLI exit code.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

class SolverFailure : public Error {
 public:
  SolverFailure(const std::string& what, int iterations, int phase)
      : Error(ErrorKind::solver_failure, what), iterations_(iterations), phase_(phase) {}

  int iterations() const noexcept { return iterations_; }
  int phase() const noexcept { return phase_; }

 private:
  int iterations_;
  int phase_;
};

/// Thrown when an iterative optimizer exhausts its budget; carries the
/// best value reached and the certified gap at that point.
class OptimizationError : public Error {
 public:
  OptimizationError(const std::string& what, double best, double gap)
      : Error(ErrorKind::optimization, what), best_(best), gap_(gap) {}

  double best() const noexcept { return best_; }
  double gap() const noexcept { return gap_; }

 private:
  double best_;
  double gap_;
};

inline void require(bool condition, ErrorKind kind, const std::string& message) {
  if (!condition) throw Error(kind, message);
}

}  // namespace mixlab
