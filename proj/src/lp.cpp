#include "mixlab/lp.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace mixlab::lp {

const char* to_string(Status status) {
  switch (status) {
    case Status::optimal: return "optimal";
    case Status::infeasible: return "infeasible";
    case Status::unbounded: return "unbounded";
  }
  return "unknown";
}

namespace {

void validate(const Problem& pb) {
  const Index m = pb.constraints.rows();
  const Index n = pb.constraints.cols();
  if (pb.objective.size() != n) throw Error(ErrorKind::parameter, "LP objective length mismatch");
  if (pb.rhs.size() != m) throw Error(ErrorKind::parameter, "LP rhs length mismatch");
  if (static_cast<Index>(pb.senses.size()) != m) throw Error(ErrorKind::parameter, "LP sense count mismatch");
  if (pb.lower.size() != 0 && pb.lower.size() != n) throw Error(ErrorKind::parameter, "LP bound length mismatch");
  if (!pb.objective.allFinite() || !pb.constraints.allFinite() || !pb.rhs.allFinite() ||
      !pb.lower.allFinite()) {
    throw Error(ErrorKind::parameter, "LP data must be finite");
  }
}

RowSense flipped(RowSense s) {
  switch (s) {
    case RowSense::greater_equal: return RowSense::less_equal;
    case RowSense::less_equal: return RowSense::greater_equal;
    case RowSense::equal: return RowSense::equal;
  }
  return s;
}

/// Standard-form tableau  [B^-1 S | B^-1 b]  with the reduced-cost row kept
/// separately.
class Tableau {
 public:
  Tableau(Matrix standard, Vector rhs, std::vector<int> basis)
      : t_(standard.rows(), standard.cols() + 1), basis_(std::move(basis)) {
    t_.leftCols(standard.cols()) = standard;
    t_.col(standard.cols()) = rhs;
  }

  Index rows() const { return t_.rows(); }
  Index cols() const { return t_.cols() - 1; }
  double rhs(Index i) const { return t_(i, cols()); }
  double at(Index i, Index j) const { return t_(i, j); }
  const std::vector<int>& basis() const { return basis_; }

  void price(const Vector& cost) {
    reduced_ = cost;
    for (Index i = 0; i < rows(); ++i) {
      const double cb = cost(basis_[i]);
      if (cb != 0.0) reduced_ -= cb * t_.row(i).head(cols()).transpose();
    }
  }

  const Vector& reduced() const { return reduced_; }

  void pivot(Index r, Index q) {
    t_.row(r) /= t_(r, q);
    for (Index i = 0; i < rows(); ++i) {
      if (i == r) continue;
      const double f = t_(i, q);
      if (f != 0.0) t_.row(i) -= f * t_.row(r);
    }
    const double dq = reduced_(q);
    if (dq != 0.0) reduced_ -= dq * t_.row(r).head(cols()).transpose();
    for (Index i = 0; i < rows(); ++i) t_(i, q) = (i == r) ? 1.0 : 0.0;
    reduced_(q) = 0.0;
    basis_[r] = static_cast<int>(q);
  }

  /// Rebuilds [B^-1 S | B^-1 b] and the reduced costs from the original
  /// data, discarding the rounding accumulated by successive pivots.
  /// Returns false when the basis matrix is numerically singular.
  bool refactor(const Matrix& standard, const Vector& rhs, const Vector& cost) {
    const Index m = rows();
    if (m == 0) return true;
    Matrix basis_matrix(m, m);
    for (Index i = 0; i < m; ++i) basis_matrix.col(i) = standard.col(basis_[i]);
    const Eigen::PartialPivLU<Matrix> lu(basis_matrix);
    if (!(std::abs(lu.determinant()) > 0.0)) return false;
    Matrix fresh(m, standard.cols() + 1);
    fresh.leftCols(standard.cols()) = lu.solve(standard);
    fresh.col(standard.cols()) = lu.solve(rhs);
    if (!fresh.allFinite()) return false;
    t_ = std::move(fresh);
    for (Index i = 0; i < m; ++i) {
      t_.col(basis_[i]).setZero();
      t_(i, basis_[i]) = 1.0;
    }
    price(cost);
    return true;
  }

  void clamp_rhs(double tol) {
    for (Index i = 0; i < rows(); ++i) {
      if (t_(i, cols()) < 0.0 && t_(i, cols()) > -tol) t_(i, cols()) = 0.0;
    }
  }

 private:
  Matrix t_;
  Vector reduced_;
  std::vector<int> basis_;
};

enum class LoopResult { optimal, unbounded };

/// Pivots between refactorizations.
constexpr int kRefactorInterval = 32;

struct Original {
  const Matrix& standard;
  const Vector& rhs;
  const Vector& cost;
};

LoopResult bland_loop(Tableau& tab, const Original& data, const std::vector<bool>& allowed, const Options& opt,
                      int& iterations, int cap, int phase) {
  int since_refactor = 0;
  // A termination test is only trusted on a freshly refactored tableau.
  auto confirm = [&]() {
    if (since_refactor == 0) return true;
    since_refactor = 0;
    return !tab.refactor(data.standard, data.rhs, data.cost);
  };
  for (;;) {
    if (since_refactor >= kRefactorInterval) {
      tab.refactor(data.standard, data.rhs, data.cost);
      since_refactor = 0;
    }
    Index q = -1;
    for (Index j = 0; j < tab.cols(); ++j) {
      if (allowed[j] && tab.reduced()(j) < -opt.optimality_tolerance) {
        q = j;
        break;
      }
    }
    if (q < 0) {
      if (confirm()) return LoopResult::optimal;
      continue;
    }

    Index r = -1;
    double best = kInfinity;
    for (Index i = 0; i < tab.rows(); ++i) {
      const double a = tab.at(i, q);
      if (a <= opt.pivot_tolerance) continue;
      const double ratio = std::max(tab.rhs(i), 0.0) / a;
      const double slack = 1e-12 * std::max(1.0, std::abs(best));
      if (r < 0 || ratio < best - slack) {
        r = i;
        best = ratio;
      } else if (std::abs(ratio - best) <= slack && tab.basis()[i] < tab.basis()[r]) {
        r = i;
        best = std::min(best, ratio);
      }
    }
    if (r < 0) {
      if (confirm()) return LoopResult::unbounded;
      continue;
    }

    if (++iterations > cap) {
      throw SolverFailure("simplex iteration cap " + std::to_string(cap) + " exceeded in phase " +
                              std::to_string(phase),
                          iterations, phase);
    }
    tab.pivot(r, q);
    ++since_refactor;
  }
}

}  // namespace

Solution solve(const Problem& pb, const Options& opt) {
  validate(pb);
  const Index m = pb.constraints.rows();
  const Index n = pb.constraints.cols();
  const Vector lower = pb.lower.size() == n ? pb.lower : Vector::Zero(n);

  Matrix a = pb.constraints;
  Vector b = pb.rhs - a * lower;
  std::vector<RowSense> sense = pb.senses;
  Vector row_sign = Vector::Ones(m);
  for (Index i = 0; i < m; ++i) {
    if (b(i) < 0.0) {
      a.row(i) *= -1.0;
      b(i) = -b(i);
      row_sign(i) = -1.0;
      sense[i] = flipped(sense[i]);
    }
  }

  Index n_slack = 0;
  Index n_art = 0;
  for (auto s : sense) {
    if (s != RowSense::equal) ++n_slack;
    if (s != RowSense::less_equal) ++n_art;
  }
  const Index total = n + n_slack + n_art;
  const Index first_art = n + n_slack;

  Matrix standard = Matrix::Zero(m, total);
  standard.leftCols(n) = a;
  std::vector<int> basis(static_cast<std::size_t>(m));
  {
    Index slack = n;
    Index art = first_art;
    for (Index i = 0; i < m; ++i) {
      switch (sense[i]) {
        case RowSense::less_equal:
          standard(i, slack) = 1.0;
          basis[i] = static_cast<int>(slack++);
          break;
        case RowSense::greater_equal:
          standard(i, slack++) = -1.0;
          standard(i, art) = 1.0;
          basis[i] = static_cast<int>(art++);
          break;
        case RowSense::equal:
          standard(i, art) = 1.0;
          basis[i] = static_cast<int>(art++);
          break;
      }
    }
  }

  Solution sol;
  const int cap = opt.iteration_factor * static_cast<int>(m + n);
  Tableau tab(standard, b, basis);

  // Phase 1: minimize the sum of artificials.
  Vector phase1_cost = Vector::Zero(total);
  phase1_cost.tail(n_art).setOnes();
  tab.price(phase1_cost);
  std::vector<bool> allowed(static_cast<std::size_t>(total), true);
  bland_loop(tab, {standard, b, phase1_cost}, allowed, opt, sol.iterations, cap, 1);

  double infeasibility = 0.0;
  for (Index i = 0; i < m; ++i) {
    if (tab.basis()[i] >= first_art) infeasibility += std::max(tab.rhs(i), 0.0);
  }
  const double scale = std::max(1.0, b.size() ? b.cwiseAbs().maxCoeff() : 0.0);
  if (infeasibility > opt.feasibility_tolerance * scale) {
    sol.status = Status::infeasible;
    return sol;
  }
  tab.clamp_rhs(opt.feasibility_tolerance * scale);

  // Drive remaining artificials out of the basis; rows where that is
  // impossible are redundant and keep a zero-valued artificial.
  for (Index i = 0; i < m; ++i) {
    if (tab.basis()[i] < first_art) continue;
    Index q = -1;
    double best = opt.pivot_tolerance;
    for (Index j = 0; j < first_art; ++j) {
      if (std::abs(tab.at(i, j)) > best) {
        best = std::abs(tab.at(i, j));
        q = j;
      }
    }
    if (q >= 0) tab.pivot(i, q);
  }

  // Phase 2.
  Vector cost = Vector::Zero(total);
  cost.head(n) = pb.objective;
  tab.price(cost);
  for (Index j = first_art; j < total; ++j) allowed[j] = false;
  if (bland_loop(tab, {standard, b, cost}, allowed, opt, sol.iterations, cap, 2) == LoopResult::unbounded) {
    sol.status = Status::unbounded;
    return sol;
  }

  // Recover primal and dual values from the final basis directly, which is
  // more accurate than the accumulated tableau.
  Matrix basis_matrix(m, m);
  Vector basis_cost(m);
  for (Index i = 0; i < m; ++i) {
    basis_matrix.col(i) = standard.col(tab.basis()[i]);
    basis_cost(i) = cost(tab.basis()[i]);
  }
  Vector shifted = Vector::Zero(n);
  Vector y = Vector::Zero(m);
  if (m > 0) {
    const Eigen::FullPivLU<Matrix> lu(basis_matrix);
    Vector xb = lu.solve(b);
    for (Index i = 0; i < m; ++i) {
      const int j = tab.basis()[i];
      if (j < n) shifted(j) = std::max(xb(i), 0.0);
    }
    y = lu.transpose().solve(basis_cost);
  }

  sol.status = Status::optimal;
  sol.primal = lower + shifted;
  sol.dual = row_sign.cwiseProduct(y);
  sol.objective = pb.objective.dot(sol.primal);
  const Vector reduced = pb.objective - pb.constraints.transpose() * sol.dual;
  sol.dual_objective = pb.rhs.dot(sol.dual) + lower.dot(reduced);
  return sol;
}

double primal_residual(const Problem& pb, const Vector& x) {
  double worst = 0.0;
  const Vector ax = pb.constraints * x;
  for (Index i = 0; i < ax.size(); ++i) {
    const double d = ax(i) - pb.rhs(i);
    switch (pb.senses[i]) {
      case RowSense::greater_equal: worst = std::max(worst, -d); break;
      case RowSense::less_equal: worst = std::max(worst, d); break;
      case RowSense::equal: worst = std::max(worst, std::abs(d)); break;
    }
  }
  const Vector lower = pb.lower.size() == x.size() ? pb.lower : Vector::Zero(x.size());
  for (Index j = 0; j < x.size(); ++j) worst = std::max(worst, lower(j) - x(j));
  return worst;
}

double dual_residual(const Problem& pb, const Vector& y) {
  double worst = 0.0;
  for (Index i = 0; i < y.size(); ++i) {
    switch (pb.senses[i]) {
      case RowSense::greater_equal: worst = std::max(worst, -y(i)); break;
      case RowSense::less_equal: worst = std::max(worst, y(i)); break;
      case RowSense::equal: break;
    }
  }
  const Vector reduced = pb.objective - pb.constraints.transpose() * y;
  if (reduced.size() > 0) worst = std::max(worst, -reduced.minCoeff());
  return worst;
}

double complementarity_gap(const Problem& pb, const Solution& sol) {
  const Vector slack = pb.constraints * sol.primal - pb.rhs;
  const Vector reduced = pb.objective - pb.constraints.transpose() * sol.dual;
  const Vector lower = pb.lower.size() == sol.primal.size() ? pb.lower : Vector::Zero(sol.primal.size());
  const double gap = slack.cwiseProduct(sol.dual).cwiseAbs().sum() +
                     (sol.primal - lower).cwiseProduct(reduced).cwiseAbs().sum();
  return gap / (1.0 + std::abs(sol.objective));
}

}  // namespace mixlab::lp
