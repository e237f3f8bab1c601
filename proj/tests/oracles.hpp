#pragma once

// Straightforward reference computations used as independent oracles. They
// favor obviousness over speed and share no code with the library.

#include <cmath>
#include <functional>
#include <limits>
#include <vector>

#include <Eigen/Dense>

namespace oracle {

using Eigen::MatrixXd;
using Eigen::VectorXd;

inline double power_sum(const std::vector<double>& sigma, const std::vector<double>& values, double p) {
  long double acc = 0.0L;
  for (std::size_t j = 0; j < sigma.size(); ++j) {
    acc += std::pow(static_cast<long double>(std::fabs(sigma[j] * values[j])), static_cast<long double>(p));
  }
  return static_cast<double>(std::pow(acc, 1.0L / p));
}

/// [sum_j |sigma_j|^q (sum_w mu_w |M_jw|^s)^(q/s)]^(1/q)
inline double mixed_objective(const VectorXd& sigma, const MatrixXd& m, double q, double s, const VectorXd& mu) {
  long double acc = 0.0L;
  for (Eigen::Index j = 0; j < m.rows(); ++j) {
    long double inner = 0.0L;
    for (Eigen::Index w = 0; w < m.cols(); ++w) inner += mu(w) * std::pow(std::fabs(m(j, w)), s);
    acc += std::pow(std::fabs(sigma(j)), q) * std::pow(inner, static_cast<long double>(q / s));
  }
  return static_cast<double>(std::pow(acc, 1.0L / q));
}

/// Max of f over the segment mu = (x, 1 - x) on a uniform grid.
inline double grid_max_2(const std::function<double(const VectorXd&)>& f, int steps) {
  double best = -std::numeric_limits<double>::infinity();
  for (int i = 0; i <= steps; ++i) {
    VectorXd mu(2);
    mu << static_cast<double>(i) / steps, 1.0 - static_cast<double>(i) / steps;
    best = std::max(best, f(mu));
  }
  return best;
}

/// Min over nu on the 1-simplex (grid) of max_i (|Q_i|^p / sum_k nu_k |H_ik|^p)^(1/p), two K points.
inline double domination_grid_2(const VectorXd& q, const MatrixXd& h, double p, int steps) {
  double best = std::numeric_limits<double>::infinity();
  for (int i = 0; i <= steps; ++i) {
    const double nu0 = static_cast<double>(i) / steps;
    double worst = 0.0;
    for (Eigen::Index r = 0; r < q.size(); ++r) {
      const double num = std::pow(std::fabs(q(r)), p);
      const double den = nu0 * std::pow(std::fabs(h(r, 0)), p) + (1.0 - nu0) * std::pow(std::fabs(h(r, 1)), p);
      if (num == 0.0) continue;
      worst = std::max(worst, den > 0.0 ? num / den : std::numeric_limits<double>::infinity());
    }
    best = std::min(best, worst);
  }
  return std::pow(best, 1.0 / p);
}

/// min c'x over {A x >= b, x >= 0} in two variables by enumerating vertices.
/// Returns +inf when infeasible; assumes the problem is bounded.
inline double lp_vertex_min_2d(const VectorXd& c, const MatrixXd& a, const VectorXd& b) {
  std::vector<Eigen::Vector3d> lines;  // u x + v y = w
  for (Eigen::Index i = 0; i < a.rows(); ++i) lines.emplace_back(a(i, 0), a(i, 1), b(i));
  lines.emplace_back(1.0, 0.0, 0.0);
  lines.emplace_back(0.0, 1.0, 0.0);
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < lines.size(); ++i) {
    for (std::size_t j = i + 1; j < lines.size(); ++j) {
      const double det = lines[i](0) * lines[j](1) - lines[i](1) * lines[j](0);
      if (std::fabs(det) < 1e-14) continue;
      const double x = (lines[i](2) * lines[j](1) - lines[i](1) * lines[j](2)) / det;
      const double y = (lines[i](0) * lines[j](2) - lines[i](2) * lines[j](0)) / det;
      if (x < -1e-12 || y < -1e-12) continue;
      bool ok = true;
      for (Eigen::Index r = 0; r < a.rows() && ok; ++r) ok = a(r, 0) * x + a(r, 1) * y >= b(r) - 1e-12;
      if (ok) best = std::min(best, c(0) * x + c(1) * y);
    }
  }
  return best;
}

}  // namespace oracle
