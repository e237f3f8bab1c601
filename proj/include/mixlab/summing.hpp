#pragma once

#include <cstdint>
#include <vector>

#include "mixlab/core.hpp"
#include "mixlab/lp.hpp"

namespace mixlab {

/// A constant delta and a probability nu on K with
///   |Q_i|^p <= delta^p * sum_k nu_k |H_ik|^p   at every probe i.
struct DominationCertificate {
  double delta = 0.0;
  SimplexMeasure nu;
  /// max_i |Q_i|^p - delta^p sum_k nu_k |H_ik|^p
  double max_violation = 0.0;
  /// Primal and dual optimal values of the LP  min sum(lambda).
  double lp_value = 0.0;
  double dual_value = 0.0;
  /// Dual multiplier of each probe's constraint, in the unscaled LP. These
  /// are the |sigma_i|^p of an extremal family.
  Vector probe_dual;
  int iterations = 0;
};

/// Smallest delta admitting a dominating probability on K, from the LP
///   minimize sum_k lambda_k  s.t.  sum_k lambda_k |H_ik|^p >= |Q_i|^p,  lambda >= 0.
/// Throws ErrorKind::not_summable when some |Q_i| > 0 has an all-zero H row.
DominationCertificate pietsch_norm_lp(const Instance& inst, double p);

/// Same LP on bare kernels: q holds one value per probe, h one row per probe.
DominationCertificate pietsch_domination(const Vector& q, const Matrix& h, double p,
                                         const lp::Options& options = {});

double domination_violation(const Vector& q, const Matrix& h, double p, double delta,
                            const Vector& nu);

struct SamplingOptions {
  int samples = 1000;
  std::uint64_t seed = 0;
  int max_family_size = 8;
  double log_sigma_range = 2.0;
  /// Draws allowed per sample before giving up on a degenerate one.
  int resample_budget = 20;
  /// Evaluated before any random family.
  std::vector<WeightedFamily> injected;
};

struct RatioBound {
  double value = 0.0;
  WeightedFamily witness;
  int evaluated = 0;
};

/// Best strong_sum / weak_sup over random families; a lower bound on the
/// p-summing norm. Families with zero denominator are redrawn.
RatioBound ratio_lower_bound(const Instance& inst, double p, const SamplingOptions& options);

/// One entry per probe with dual_i > 0 and sigma_i = dual_i^(1/p).
WeightedFamily witness_from_dual(const Instance& inst, const Vector& dual, double p);

}  // namespace mixlab
