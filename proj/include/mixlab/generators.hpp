#pragma once

#include <random>

#include "mixlab/adapters.hpp"
#include "mixlab/core.hpp"
#include "mixlab/mixed_norm.hpp"
#include "mixlab/mixing.hpp"
#include "mixlab/multilinear.hpp"

namespace mixlab {

using Rng = std::mt19937_64;

/// Every size uniform on 1..max.
InstanceSizes random_sizes(Rng& rng, const InstanceSizes& max);

/// Kernel entries uniform on [-1, 1].
Instance random_instance(Rng& rng, const InstanceSizes& sizes);

/// W = K and M = H, with Q = max_k |H|.
Instance identity_instance(Rng& rng, const InstanceSizes& sizes);

MixedFamilyValues random_mixed_values(Rng& rng, int m, int n_w);

/// Free kernels Q1, H1, M1, H; the rest forced admissible by pointwise
/// bounds: Q2 = min(free, |Q1 o T|), M2 = min(free, |M1 o T|) and
/// M = max(free, |H1 o T|).
TwoLayerInstance random_two_layer(Rng& rng, const TwoLayerSizes& sizes);

/// The max-abs-coordinate norm on R^d: functionals e_i, vertices {-1, 1}^d.
SeminormBallModel infinity_ball(int d);

struct LinearWitness {
  Instance instance;
  SeminormBallModel ball;
};

/// Random m_coeff in [-1, 1]; M is <m_coeff, vertex> on the ball's vertices.
LinearWitness random_linear_witness(Rng& rng, const InstanceSizes& sizes, const SeminormBallModel& ball);

/// Random T with entries in [-1, 1], coordinate nets and default probes.
LinearOperatorSpec random_linear_spec(Rng& rng, int n_e, int n_f);

/// Random points in the plane with the Euclidean metric (base point 0 at the
/// origin), a random base-point-preserving map, and distance nets.
LipschitzMapSpec random_lipschitz_spec(Rng& rng, int n_x, int n_y);

MultilinearInstance random_multilinear(Rng& rng, const MultilinearSizes& sizes, const Vector& p, double q, double s);

/// The one-factor multilinear instance with the kernels of `inst`.
MultilinearInstance lift_instance(const Instance& inst, double q, double s);

}  // namespace mixlab
