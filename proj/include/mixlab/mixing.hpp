#pragma once

#include <array>
#include <string>
#include <vector>

#include "mixlab/core.hpp"
#include "mixlab/mixed_norm.hpp"
#include "mixlab/summing.hpp"

namespace mixlab {

/// Largest W discretization accepted by the measure search.
inline constexpr int kMaxMixingPoints = 6;

/// Probe values (sum_w mu_w |M_iw|^s)^(1/s) for every probe i.
Vector mixing_probe_values(const Instance& inst, const Vector& mu, double s);

/// Throws ErrorKind::not_mixing when some probe has a nonzero M row but an
/// identically zero H row.
void require_mixing_support(const Instance& inst);

/// Ratio of the family's mixed (s;q)-norm to its weak p-sum over K.
/// Returns a negative number when the denominator vanishes.
double mixing_ratio(const Instance& inst, const WeightedFamily& fam, const ExponentParams& e);

/// Best sampled mixing ratio; a certified lower bound for the mixing constant.
RatioBound mixing_lower_bound(const Instance& inst, const ExponentParams& e,
                              const SamplingOptions& options);

struct MixingUpperResult {
  double value = 0.0;
  SimplexMeasure worst_mu;
  /// The domination LP at worst_mu.
  DominationCertificate certificate;
  /// Extremal family read off the LP dual at worst_mu; empty when value is 0.
  WeightedFamily witness;
  int evaluations = 0;
};

/// The mixing constant for p == q as a supremum over probabilities mu on W
/// of the domination constant of the instance whose Q is replaced by
/// mixing_probe_values(mu). The search is the deterministic simplex search
/// followed by alternating between the LP dual family and that family's
/// optimal measure, which never decreases the value.
MixingUpperResult mixing_upper_domination(const Instance& inst, const ExponentParams& e, int grid_depth);

/// A seminorm P(v) = max_i |<f_i, v>| on R^d, its unit ball's vertex list,
/// and the linear map v -> <m_coeff(probe), v> standing for M.
struct SeminormBallModel {
  int d = 1;
  Matrix functionals;  // one functional per row
  Matrix vertices;     // one vertex per row
  Matrix m_coeff;      // one row per probe

  double seminorm(const Vector& v) const;
  /// Checks shapes, vertex symmetry and P(vertex) == 1.
  void validate() const;
  /// The instance's M must equal <m_coeff, vertex> on every W point.
  void check_instance(const Instance& inst) const;
};

struct SeminormCheckOptions {
  int samples = 200;
  std::uint64_t seed = 0;
  int max_family_size = 8;
  double log_sigma_range = 2.0;
  /// Random Gaussian tuples tried per family besides the structured one.
  int random_tuples = 4;
  int max_tuple_size = 4;
  std::vector<WeightedFamily> injected;
};

struct SeminormCheck {
  double max_ratio = 0.0;
  bool holds = true;
  WeightedFamily witness;
  Matrix tuple;  // one v per row
};

/// Evaluates both sides of the seminorm-ball form of the mixing inequality,
///   [sum_j |s_j|^q (sum_k |M(v_k)|^s)^(q/s)]^(1/q)
///     <= delta * weak_p(family) * [sum_k P(v_k)^s]^(1/s),
/// on sampled families and tuples. For each family one tuple is built from
/// the family's optimal measure (v_k = mu_k^(1/s) * vertex_k); the others
/// are Gaussian. Returns the largest LHS / (weak * P-sum) ratio seen.
SeminormCheck check_seminorm_characterization(const Instance& inst, const SeminormBallModel& ball,
                                              const ExponentParams& e, double delta,
                                              const SeminormCheckOptions& options);

/// Two maps composed on finite ground sets: T : A -> B through t_map and
/// the C-identification c_map : C -> C1. Layer one (the outer map S) lives
/// on probes (b, c1, g), layer two on probes (a, c, g).
struct TwoLayerSizes {
  int a = 1;
  int b = 1;
  int c = 1;
  int c1 = 1;
  int g = 1;
  int k = 1;
  int w = 1;

  bool operator==(const TwoLayerSizes&) const = default;
};

class TwoLayerInstance {
 public:
  TwoLayerInstance(TwoLayerSizes sizes, std::vector<int> t_map, std::vector<int> c_map, Vector q1,
                   Matrix h1, Matrix m1, Vector q2, Matrix h, Matrix m, Matrix m2);

  const TwoLayerSizes& sizes() const { return sizes_; }
  const std::vector<int>& t_map() const { return t_map_; }
  const std::vector<int>& c_map() const { return c_map_; }
  const Vector& q1() const { return q1_; }
  const Matrix& h1() const { return h1_; }
  const Matrix& m1() const { return m1_; }
  const Vector& q2() const { return q2_; }
  const Matrix& h() const { return h_; }
  const Matrix& m() const { return m_; }
  const Matrix& m2() const { return m2_; }

  int outer_probe(int b, int c1, int g) const { return (b * sizes_.c1 + c1) * sizes_.g + g; }
  int inner_probe(int a, int c, int g) const { return (a * sizes_.c + c) * sizes_.g + g; }
  /// Layer-one probe reached from layer-two probe (a, c, g).
  int image_probe(int inner) const;

  /// (Q1, H1 over W, M1): the outer map with W as its probe space.
  Instance summing_layer() const;
  /// (Q2, H, M): the inner map T.
  Instance mixing_layer() const;
  /// (Q2, H, M2): the composition S o T.
  Instance composite_layer() const;

  friend bool operator==(const TwoLayerInstance& lhs, const TwoLayerInstance& rhs);

 private:
  TwoLayerSizes sizes_;
  std::vector<int> t_map_;
  std::vector<int> c_map_;
  Vector q1_;
  Matrix h1_;
  Matrix m1_;
  Vector q2_;
  Matrix h_;
  Matrix m_;
  Matrix m2_;
};

struct ConditionResult {
  std::string name;
  /// max over indices of (left side - right side); <= 0 means it holds.
  double worst = 0.0;
  /// (a, c, g, w) of the worst index; w is -1 for scalar conditions.
  std::array<int, 4> where{0, 0, 0, -1};
};

struct ConditionReport {
  ConditionResult q_bound;       // |Q2(a,c,g)| <= |Q1(Ta, c', g)|
  ConditionResult m_bound;       // |M2(a,c,g,w)| <= |M1(Ta, c', g, w)|
  ConditionResult h_bound;       // |H1(Ta, c', g, w)| <= |M(a,c,g,w)|

  bool admissible(double tol = 0.0) const;
};

ConditionReport check_conditions(const TwoLayerInstance& two);

struct InequalityCheck {
  double lhs = 0.0;
  double rhs = 0.0;
  bool holds = true;
};

/// lhs: q-summing norm of the composite (H, Q2); rhs: s-summing norm of
/// the outer layer times the ((s;q),q) mixing constant of the inner one.
InequalityCheck check_composition_summing(const TwoLayerInstance& two, const ExponentParams& e,
                                          int grid_depth = 8, double tol = 1e-6);

/// c2 at (s2;q2) against c1 at (s1;q1), for q1 <= q2 <= s2 <= s1.
InequalityCheck check_inclusion(const Instance& inst, const ExponentParams& e1, const ExponentParams& e2,
                                int grid_depth = 8, double tol = 1e-5);

/// lhs: ((t;q),q) constant of (H, M2); rhs: ((t;s),s) constant of the
/// outer layer times the ((s;q),q) constant of (H, M).
InequalityCheck check_composition_mixing(const TwoLayerInstance& two, double q, double s, double t,
                                         int grid_depth = 8, double tol = 1e-5);

}  // namespace mixlab
