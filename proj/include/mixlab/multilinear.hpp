#pragma once

#include <cstdint>
#include <vector>

#include "mixlab/core.hpp"
#include "mixlab/mixing.hpp"

namespace mixlab {

/// Factor sizes of a multilinear instance. `a` and `c` list the domain
/// factors; `g` and `k` list one (G_k, K_k) pair per kernel H_k.
///
/// Joint indices are flattened row-major with the first factor slowest:
/// joint_a = (a_1 * |A_2| + a_2) * |A_3| + ...; likewise for c and g.
struct MultilinearSizes {
  std::vector<int> a;
  std::vector<int> c;
  std::vector<int> g;
  std::vector<int> k;
  int w = 1;

  int joint_a() const;
  int joint_c() const;
  int joint_g() const;
  int kernels() const { return static_cast<int>(k.size()); }

  bool operator==(const MultilinearSizes&) const = default;
};

struct MultiEntry {
  double sigma = 1.0;
  int a = 0;           // joint a index
  int c = 0;           // joint c index
  std::vector<int> g;  // one index per kernel

  bool operator==(const MultiEntry&) const = default;
};

using MultiFamily = std::vector<MultiEntry>;

/// Kernel H_k has one row per (joint_a, joint_c, g_k) and one column per
/// point of K_k; M has one row per (joint_a, joint_c, joint_g).
class MultilinearInstance {
 public:
  MultilinearInstance(MultilinearSizes sizes, std::vector<Matrix> h, Matrix m, Vector p, double q, double s);

  const MultilinearSizes& sizes() const { return sizes_; }
  const std::vector<Matrix>& h() const { return h_; }
  const Matrix& m() const { return m_; }
  const Vector& p() const { return p_; }
  double q() const { return q_; }
  double s() const { return s_; }
  ExponentParams exponents() const { return ExponentParams{q_, q_, s_}; }

  int h_row(int kernel, int a, int c, int g) const;
  int m_row(int a, int c, const std::vector<int>& g) const;
  void validate(const MultiFamily& fam) const;

  friend bool operator==(const MultilinearInstance& lhs, const MultilinearInstance& rhs);

 private:
  MultilinearSizes sizes_;
  std::vector<Matrix> h_;
  Matrix m_;
  Vector p_;
  double q_;
  double s_;
};

/// sigma and M rows of the family, for the mixed norm.
MixedFamilyValues multi_values(const MultilinearInstance& mi, const MultiFamily& fam);

/// prod_k max_{K_k} [sum_j |sigma_j|^p_k |H_k(a_j, c_j, g_j^k)|^p_k]^(1/p_k)
double multi_weak_product(const MultilinearInstance& mi, const MultiFamily& fam);

/// Mixed norm over the weak product; negative when the product vanishes.
double multi_mixing_ratio(const MultilinearInstance& mi, const MultiFamily& fam);

struct MultiSamplingOptions {
  int samples = 1000;
  std::uint64_t seed = 0;
  int max_family_size = 8;
  double log_sigma_range = 2.0;
  int resample_budget = 20;
  std::vector<MultiFamily> injected;
};

struct MultiRatioBound {
  double value = 0.0;
  MultiFamily witness;
  int evaluated = 0;
};

/// Draws entries in the same order as the single-factor sampler, so a
/// one-factor instance sees exactly the families mixing_lower_bound sees.
MultiRatioBound multi_mixing_lower_bound(const MultilinearInstance& mi, const MultiSamplingOptions& options);

/// How the q == s case is evaluated by multi_characterization_check.
enum class CasePath { automatic, closed_form, general };

struct MultiCheckOptions {
  int samples = 200;
  std::uint64_t seed = 0;
  int max_family_size = 8;
  double log_sigma_range = 2.0;
  int random_tuples = 4;
  int max_tuple_size = 4;
  std::vector<MultiFamily> injected;
  CasePath path = CasePath::automatic;
};

struct MultiCheck {
  double max_ratio = 0.0;
  bool holds = true;
  MultiFamily witness;
};

/// The seminorm-ball inequality with the product of weak sums on the right.
/// At q == s the closed_form path scores a family by its closed-form mixed
/// norm; the general path builds the tuple from the optimal measure.
MultiCheck multi_characterization_check(const MultilinearInstance& mi, const SeminormBallModel& ball, double delta,
                                        const MultiCheckOptions& options);

/// The single-factor instance (Q = 0) whose computations coincide with the
/// multilinear ones. Requires one A factor and one kernel.
Instance reduce_t1(const MultilinearInstance& mi);

/// A single-factor family seen as a multilinear one, and back.
MultiFamily lift_family(const WeightedFamily& fam, const Instance& inst);
WeightedFamily lower_family(const MultiFamily& fam, const Instance& inst);

}  // namespace mixlab
