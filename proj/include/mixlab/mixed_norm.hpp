#pragma once

#include <cstdint>
#include <vector>

#include "mixlab/core.hpp"

namespace mixlab {

/// A family reduced to what the mixed norm sees: its weights and the
/// |M| values of each element over the W points.
struct MixedFamilyValues {
  Vector sigma;
  Matrix values;  // one row per family element, one column per W point

  MixedFamilyValues() = default;
  MixedFamilyValues(Vector sigma, Matrix values);

  static MixedFamilyValues from(const Instance& inst, const WeightedFamily& fam);

  Index size() const { return sigma.size(); }
  Index points() const { return values.cols(); }
};

/// max_w [sum_j |sigma_j|^q |M_jw|^q]^(1/q), the exact value when s == q.
double mixed_norm_closed_qq(const MixedFamilyValues& vals, double q);

/// [sum_j |sigma_j|^q (sum_w mu_w |M_jw|^s)^(q/s)]^(1/q)
double mixed_objective(const MixedFamilyValues& vals, const ExponentParams& e, const Vector& mu);

struct SupMeasureOptions {
  double gap_tolerance = 1e-10;
  int max_iterations = 10000;
};

struct MixedNormResult {
  double value = 0.0;
  SimplexMeasure mu_star;
  Vector tau;
  /// Relative spread between the certified upper bound and the value.
  double gap = 0.0;
  int iterations = 0;
};

/// Maximizes mixed_objective over the W simplex. The q-th power of the
/// objective is concave, so Frank-Wolfe steps with an exact line search,
/// accelerated by Newton steps on the current support face, reach the
/// global maximum. The duality gap of the linearization certifies it.
/// Accepts q <= s; at q == s the objective is linear and a vertex wins.
MixedNormResult mixed_norm_sup_measure(const MixedFamilyValues& vals, const ExponentParams& e,
                                       const SupMeasureOptions& options = {});

/// The mixed norm itself: closed form at q == s, sup over measures otherwise.
double mixed_norm(const MixedFamilyValues& vals, const ExponentParams& e);

struct TauProduct {
  Vector tau;
  double product = 0.0;
};

/// ||tau||_r * max_w [sum_j |sigma_j / tau_j|^s |M_jw|^s]^(1/s).
/// Elements with an all-zero M row are left out of both factors.
double tau_product(const MixedFamilyValues& vals, const ExponentParams& e, const Vector& tau);

/// tau_j = (xi_j + eps)^(1/q) with xi_j = (|sigma_j|^s sum_w mu_w |M_jw|^s)^(1/(u v)).
/// Zero rows get tau_j = 1.
TauProduct tau_from_measure(const MixedFamilyValues& vals, const ExponentParams& e,
                            const SimplexMeasure& mu, double eps);

struct TauLadder {
  std::vector<double> eps;
  std::vector<double> products;
  /// Linear extrapolation of the last two rungs to eps = 0.
  double extrapolated = 0.0;
};

TauLadder tau_ladder(const MixedFamilyValues& vals, const ExponentParams& e,
                     const SimplexMeasure& mu, double eps_max = 1e-3, double eps_min = 1e-9);

/// Direct minimization of tau_product over positive tau. The logarithm of
/// the product is convex in log(tau), and the minimum is found by a
/// log-barrier Newton method on its epigraph form, from `restarts` random
/// starting points. Requires q < s.
double mixed_norm_tau_search(const MixedFamilyValues& vals, const ExponentParams& e, int restarts,
                             std::uint64_t seed);

}  // namespace mixlab
