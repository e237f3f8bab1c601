#pragma once

#include <vector>

#include "mixlab/core.hpp"
#include "mixlab/mixing.hpp"
#include "mixlab/summing.hpp"

namespace mixlab {

/// A matrix T : R^nE -> R^nF with the max-abs norm on both sides, so dual
/// functionals are measured in the l1 norm.
struct LinearOperatorSpec {
  Matrix t;        // nF x nE
  Matrix k_net;    // functionals on the domain, one per row
  Matrix w_net;    // functionals on the codomain, one per row
  Matrix probes;   // domain vectors, one per row

  void validate() const;
};

/// Rows +-e_i of the n x n identity.
Matrix coordinate_net(int n);
/// Rows e_i, then e_i + e_j and e_i - e_j for i < j.
Matrix default_probes(int n);

/// A = probes, C = G = {0}; H(a, k) = <x_a, x*_k>, M(a, w) = <T x_a, b*_w>,
/// Q(a) = max_w |<T x_a, b*_w>|. The pairings are stored without the 1/sigma
/// factor, which cancels in every quantity.
Instance build_linear_instance(const LinearOperatorSpec& spec);

/// A map between finite pointed metric spaces (base point 0). Net functions
/// are given by their values on the points.
struct LipschitzMapSpec {
  Matrix dx;             // domain metric
  Matrix dy;             // codomain metric
  std::vector<int> map;  // image of each domain point
  Matrix k_net;          // functions on the domain, one per row
  Matrix w_net;          // functions on the codomain, one per row

  void validate() const;
};

/// Throws ErrorKind::invariant unless d is a symmetric, zero-diagonal,
/// nonnegative matrix obeying the triangle inequality within 1e-12.
void validate_metric(const Matrix& d, const char* name);
/// Lipschitz constant of f (values per point) with respect to d.
double lipschitz_constant(const Vector& f, const Matrix& d);
/// The functions d(., x) - d(0, x), one per point x, keeping one of each
/// pair that agree up to sign.
Matrix distance_net(const Matrix& d);

/// Ordered pairs (x', x'') with x' != x'', in row-major order.
std::vector<std::array<int, 2>> point_pairs(int n);

/// A = ordered pairs of distinct points, C = G = {0};
/// H(pair, k) = f_k(x') - f_k(x''), M(pair, w) = g_w(Tx') - g_w(Tx''),
/// Q(pair) = d_Y(Tx', Tx'').
Instance build_lipschitz_instance(const LipschitzMapSpec& spec);

struct ClassicalResult {
  double value = 0.0;
  SimplexMeasure worst_mu;
};

/// For every probability mu on the codomain net, the least C with
///   (int |<T x, b*>|^s dmu)^(1/s) <= C (int |<x, a*>|^q dnu)^(1/q)
/// for some nu, maximized over mu. Each C(mu) comes from the LP
///   maximize theta  s.t.  sum_k nu_k |<x, a*_k>|^q >= theta (...)^q,  sum nu = 1.
ClassicalResult linear_mixing_classical(const LinearOperatorSpec& spec, double q, double s, int grid_depth);

/// The same criterion for Lipschitz maps on pairs of points.
ClassicalResult lipschitz_mixing_classical(const LipschitzMapSpec& spec, double q, double s, int grid_depth);

struct EmbeddingResult {
  TwoLayerInstance layer;
  /// s-summing norm of the evaluation layer; 1 unless the instance is zero.
  double pi_check = 0.0;
  DominationCertificate certificate;
  /// max over probes of (sum_w mu_w |M|^s)^(1/s) - Q2; at most 0 by construction.
  double domination_gap = 0.0;
};

/// The evaluation map of the W kernels into s-integrable functions over
/// (W, mu). Its outer layer has one probe per instance probe, carrying H1 =
/// M and Q1 = (sum_w mu_w |H1|^s)^(1/s), plus one probe per (c, g) on which
/// |H1| is constant (the constant function); the inner layer is the
/// instance itself with Q2 = (sum_w mu_w |M|^s)^(1/s).
EmbeddingResult build_embedding_Jmu(const Instance& inst, const SimplexMeasure& mu, double s);

}  // namespace mixlab
