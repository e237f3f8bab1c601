#pragma once

#include <Eigen/Dense>

#include <array>
#include <cmath>
#include <limits>
#include <vector>

#include "mixlab/error.hpp"

namespace mixlab {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;
using Index = Eigen::Index;

inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

namespace detail {

template <typename Scalar>
Scalar pairwise_sum(const Scalar* x, Index n) {
  if (n <= 8) {
    Scalar acc(0);
    for (Index i = 0; i < n; ++i) acc += x[i];
    return acc;
  }
  const Index half = n / 2;
  return pairwise_sum(x, half) + pairwise_sum(x + half, n - half);
}

}  // namespace detail

/// Cascade summation over every coefficient of an expression. Rounding error
/// grows like O(log n) instead of O(n).
template <typename Derived>
typename Derived::Scalar pairwise_sum(const Eigen::DenseBase<Derived>& x) {
  using Scalar = typename Derived::Scalar;
  const Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> plain = x;
  return detail::pairwise_sum(plain.data(), plain.size());
}

/// [sum_i |x_i|^p]^(1/p) for any p > 0. The entries are normalized by their
/// maximum before powering, so neither large nor tiny magnitudes overflow.
template <typename Derived>
typename Derived::Scalar lp_norm(const Eigen::MatrixBase<Derived>& x,
                                 typename Derived::Scalar p) {
  using Scalar = typename Derived::Scalar;
  using std::pow;
  if (x.size() == 0) return Scalar(0);
  const auto a = x.cwiseAbs().eval();
  const Scalar scale = a.maxCoeff();
  if (!(scale > Scalar(0))) return Scalar(0);
  if (!std::isfinite(static_cast<double>(scale))) return scale;
  const Scalar inner = pairwise_sum((a / scale).array().pow(p));
  return scale * pow(inner, Scalar(1) / p);
}

/// [sum_j |sigma_j * v_j|^p]^(1/p).
template <typename DS, typename DV>
typename DS::Scalar weighted_lp(const Eigen::MatrixBase<DS>& sigma,
                                const Eigen::MatrixBase<DV>& values,
                                typename DS::Scalar p) {
  return lp_norm(sigma.cwiseAbs().cwiseProduct(values.cwiseAbs()), p);
}

/// max over columns k of [sum_j |sigma_j * rows(j, k)|^p]^(1/p).
template <typename DS, typename DR>
typename DS::Scalar weighted_lp_sup(const Eigen::MatrixBase<DS>& sigma,
                                    const Eigen::MatrixBase<DR>& rows,
                                    typename DS::Scalar p) {
  using Scalar = typename DS::Scalar;
  Scalar best(0);
  for (Index k = 0; k < rows.cols(); ++k) {
    const Scalar v = weighted_lp(sigma, rows.col(k), p);
    if (v > best) best = v;
  }
  return best;
}

/// Exponents of a mixed (s;q) quantity together with the summing exponent p.
/// The conjugate index r obeys 1/r = 1/q - 1/s and is infinite when q == s.
struct ExponentParams {
  double p = 1.0;
  double q = 1.0;
  double s = 1.0;

  /// Validates 0 < q <= s < inf and 0 < p < inf.
  static ExponentParams make(double p, double q, double s);
  /// The diagonal case p == q used by the domination theorems.
  static ExponentParams mixing(double q, double s) { return make(q, q, s); }

  bool r_infinite() const { return q == s; }
  double r() const { return r_infinite() ? kInfinity : 1.0 / (1.0 / q - 1.0 / s); }
  double u() const { return r() / q; }
  double v() const { return s / q; }
};

void validate_positive(double value, const char* name);

struct InstanceSizes {
  int a = 1;
  int c = 1;
  int g = 1;
  int k = 1;
  int w = 1;

  int probes() const { return a * c * g; }
  bool operator==(const InstanceSizes&) const = default;
};

/// One map T folded into its kernels on finite ground sets. Tensors are
/// stored with one row per probe (a, c, g), flattened row-major, so that
/// q(i), h(i, k) and m(i, w) read the kernels at probe i.
class Instance {
 public:
  Instance(InstanceSizes sizes, Vector q, Matrix h, Matrix m);

  const InstanceSizes& sizes() const { return sizes_; }
  int probe_count() const { return sizes_.probes(); }
  int probe(int a, int c, int g) const;
  std::array<int, 3> unflatten(int probe) const;

  const Vector& q() const { return q_; }
  const Matrix& h() const { return h_; }
  const Matrix& m() const { return m_; }

  friend bool operator==(const Instance& lhs, const Instance& rhs);

 private:
  InstanceSizes sizes_;
  Vector q_;
  Matrix h_;
  Matrix m_;
};

struct FamilyEntry {
  double sigma = 1.0;
  int a = 0;
  int c = 0;
  int g = 0;

  bool operator==(const FamilyEntry&) const = default;
};

/// A finite family of nonzero weights attached to probes.
class WeightedFamily {
 public:
  WeightedFamily() = default;
  explicit WeightedFamily(std::vector<FamilyEntry> entries);

  const std::vector<FamilyEntry>& entries() const { return entries_; }
  int size() const { return static_cast<int>(entries_.size()); }
  bool empty() const { return entries_.empty(); }

  Vector sigma() const;
  /// Probe rows in the given instance; throws ErrorKind::index when out of range.
  std::vector<int> probes(const Instance& inst) const;

  bool operator==(const WeightedFamily&) const = default;

 private:
  std::vector<FamilyEntry> entries_;
};

/// Probability vector on a finite discretization of K or W.
class SimplexMeasure {
 public:
  static constexpr double kSumTolerance = 1e-12;

  SimplexMeasure() = default;
  explicit SimplexMeasure(Vector weights);

  static SimplexMeasure dirac(int index, int n);
  static SimplexMeasure uniform(int n);
  /// Clips negatives and renormalizes; for optimizer output.
  static SimplexMeasure normalized(const Vector& raw);

  const Vector& weights() const { return weights_; }
  int size() const { return static_cast<int>(weights_.size()); }
  double operator[](int i) const { return weights_(i); }

 private:
  Vector weights_;
};

enum class Side { k, w };

/// [sum_j |sigma_j|^p |Q(a_j, c_j, g_j)|^p]^(1/p)
double strong_sum(const Instance& inst, const WeightedFamily& fam, double p);

/// max over the K (or W) points of [sum_j |sigma_j|^p |kernel_j|^p]^(1/p),
/// with kernel H on the K side and M on the W side.
double weak_sup(const Instance& inst, const WeightedFamily& fam, double p, Side side);

/// Gathers the rows of `source` at the given probe indices.
Matrix gather_rows(const Matrix& source, const std::vector<int>& rows);

}  // namespace mixlab
