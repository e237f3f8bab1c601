#pragma once

#include <vector>

#include "mixlab/core.hpp"

namespace mixlab::lp {

enum class RowSense { greater_equal, less_equal, equal };
enum class Status { optimal, infeasible, unbounded };

const char* to_string(Status status);

/// minimize c'x  subject to  A x (>=, <=, =) b  and  x >= lower.
/// An empty `lower` means every lower bound is zero.
struct Problem {
  Vector objective;
  Matrix constraints;
  Vector rhs;
  std::vector<RowSense> senses;
  Vector lower;
};

struct Solution {
  Status status = Status::infeasible;
  Vector primal;
  /// One multiplier per row. Signs follow the usual convention for a
  /// minimization: >= rows carry y >= 0, <= rows carry y <= 0.
  Vector dual;
  double objective = 0.0;
  double dual_objective = 0.0;
  int iterations = 0;
};

struct Options {
  double feasibility_tolerance = 1e-9;
  double pivot_tolerance = 1e-11;
  double optimality_tolerance = 1e-11;
  /// Iteration cap is this factor times (rows + columns).
  int iteration_factor = 50;
};

/// Dense two-phase primal simplex with Bland's rule. Deterministic: the
/// same problem always produces bit-identical output.
Solution solve(const Problem& problem, const Options& options = {});

/// max violation of A x (sense) b and x >= lower.
double primal_residual(const Problem& problem, const Vector& x);
/// max violation of dual sign constraints and reduced-cost sign c - A'y >= 0
/// (on variables at their lower bound).
double dual_residual(const Problem& problem, const Vector& y);
/// sum of |slack_i * y_i| + |x_j - l_j| * |(c - A'y)_j|, relative to 1 + |objective|.
double complementarity_gap(const Problem& problem, const Solution& solution);

}  // namespace mixlab::lp
