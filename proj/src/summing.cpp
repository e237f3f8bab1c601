#include "mixlab/summing.hpp"

#include <algorithm>
#include <string>

#include "mixlab/sampling.hpp"

namespace mixlab {

double domination_violation(const Vector& q, const Matrix& h, double p, double delta,
                            const Vector& nu) {
  double worst = -kInfinity;
  const double dp = std::pow(delta, p);
  for (Index i = 0; i < q.size(); ++i) {
    const double lhs = std::pow(std::abs(q(i)), p);
    const double rhs = dp * pairwise_sum(nu.cwiseProduct(h.row(i).transpose().cwiseAbs().array().pow(p).matrix()));
    worst = std::max(worst, lhs - rhs);
  }
  return worst;
}

DominationCertificate pietsch_domination(const Vector& q, const Matrix& h, double p,
                                         const lp::Options& options) {
  validate_positive(p, "p");
  if (q.size() != h.rows()) throw Error(ErrorKind::parameter, "kernel row count mismatch");
  if (h.cols() < 1) throw Error(ErrorKind::parameter, "empty K discretization");
  const Index n_k = h.cols();

  std::vector<Index> active;
  for (Index i = 0; i < q.size(); ++i) {
    if (std::abs(q(i)) > 0.0) active.push_back(i);
  }

  DominationCertificate cert;
  cert.probe_dual = Vector::Zero(q.size());
  if (active.empty()) {
    cert.nu = SimplexMeasure::uniform(static_cast<int>(n_k));
    return cert;
  }

  // Row i divided by |Q_i|^p: every right-hand side becomes 1.
  lp::Problem pb;
  pb.objective = Vector::Ones(n_k);
  pb.constraints.resize(static_cast<Index>(active.size()), n_k);
  pb.rhs = Vector::Ones(static_cast<Index>(active.size()));
  pb.senses.assign(active.size(), lp::RowSense::greater_equal);
  for (std::size_t r = 0; r < active.size(); ++r) {
    const Index i = active[r];
    const double qi = std::abs(q(i));
    bool any = false;
    for (Index k = 0; k < n_k; ++k) {
      const double ratio = std::abs(h(i, k)) / qi;
      pb.constraints(static_cast<Index>(r), k) = ratio > 0.0 ? std::pow(ratio, p) : 0.0;
      any = any || ratio > 0.0;
    }
    if (!any) {
      throw Error(ErrorKind::not_summable,
                  "probe " + std::to_string(i) + " has |Q| > 0 but an identically zero H row");
    }
  }

  const lp::Solution sol = lp::solve(pb, options);
  if (sol.status != lp::Status::optimal) {
    throw Error(ErrorKind::solver_failure,
                std::string("domination LP ended ") + lp::to_string(sol.status));
  }
  cert.iterations = sol.iterations;
  cert.lp_value = pairwise_sum(sol.primal);
  cert.dual_value = pairwise_sum(sol.dual);
  cert.nu = SimplexMeasure::normalized(sol.primal);

  // Recompute delta from nu so the certificate is tight at the worst probe.
  const Vector& nu = cert.nu.weights();
  double worst = 0.0;
  for (Index r = 0; r < pb.constraints.rows(); ++r) {
    const double cover = pairwise_sum(pb.constraints.row(r).transpose().cwiseProduct(nu));
    worst = std::max(worst, 1.0 / cover);
  }
  cert.delta = std::pow(worst, 1.0 / p);

  const double y_max = sol.dual.size() ? sol.dual.cwiseAbs().maxCoeff() : 0.0;
  for (std::size_t r = 0; r < active.size(); ++r) {
    double y = sol.dual(static_cast<Index>(r));
    if (y <= 1e-15 * y_max) y = 0.0;
    const Index i = active[r];
    cert.probe_dual(i) = y / std::pow(std::abs(q(i)), p);
  }
  cert.max_violation = domination_violation(q, h, p, cert.delta, nu);
  return cert;
}

DominationCertificate pietsch_norm_lp(const Instance& inst, double p) {
  return pietsch_domination(inst.q(), inst.h(), p);
}

WeightedFamily witness_from_dual(const Instance& inst, const Vector& dual, double p) {
  validate_positive(p, "p");
  if (dual.size() != inst.probe_count()) throw Error(ErrorKind::parameter, "dual length must match probe count");
  std::vector<FamilyEntry> entries;
  for (Index i = 0; i < dual.size(); ++i) {
    if (dual(i) < -1e-9) throw Error(ErrorKind::parameter, "dual weights must be nonnegative");
    if (dual(i) > 0.0) {
      const auto idx = inst.unflatten(static_cast<int>(i));
      entries.push_back(FamilyEntry{std::pow(dual(i), 1.0 / p), idx[0], idx[1], idx[2]});
    }
  }
  if (entries.empty()) throw Error(ErrorKind::empty_witness, "dual vector is identically zero");
  return WeightedFamily(std::move(entries));
}

RatioBound ratio_lower_bound(const Instance& inst, double p, const SamplingOptions& options) {
  validate_positive(p, "p");
  RatioBound best;
  bool found = false;
  auto consider = [&](const WeightedFamily& fam) {
    const double den = weak_sup(inst, fam, p, Side::k);
    if (!(den > 0.0)) return false;
    ++best.evaluated;
    const double ratio = strong_sum(inst, fam, p) / den;
    if (!found || ratio > best.value) {
      best.value = ratio;
      best.witness = fam;
      found = true;
    }
    return true;
  };

  for (const auto& fam : options.injected) consider(fam);
  FamilySampler sampler(options.seed, options.max_family_size, options.log_sigma_range);
  for (int n = 0; n < options.samples; ++n) {
    for (int attempt = 0; attempt < options.resample_budget; ++attempt) {
      if (consider(sampler.family(inst.sizes()))) break;
    }
  }
  if (!found) throw Error(ErrorKind::degenerate, "every sampled family has zero weak sum");
  return best;
}

}  // namespace mixlab
