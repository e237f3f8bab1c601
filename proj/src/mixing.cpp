#include "mixlab/mixing.hpp"

#include <algorithm>
#include <string>

#include "mixlab/sampling.hpp"
#include "mixlab/simplex_search.hpp"

namespace mixlab {

Vector mixing_probe_values(const Instance& inst, const Vector& mu, double s) {
  validate_positive(s, "s");
  if (mu.size() != inst.sizes().w) throw Error(ErrorKind::parameter, "measure length must match W");
  const Vector weights = mu.cwiseMax(0.0).array().pow(1.0 / s).matrix();
  Vector out(inst.probe_count());
  for (Index i = 0; i < out.size(); ++i) out(i) = weighted_lp(weights, inst.m().row(i).transpose(), s);
  return out;
}

void require_mixing_support(const Instance& inst) {
  for (Index i = 0; i < inst.probe_count(); ++i) {
    if (inst.m().row(i).cwiseAbs().maxCoeff() > 0.0 && inst.h().row(i).cwiseAbs().maxCoeff() == 0.0) {
      const auto idx = inst.unflatten(static_cast<int>(i));
      throw Error(ErrorKind::not_mixing, "probe (" + std::to_string(idx[0]) + "," + std::to_string(idx[1]) +
                                             "," + std::to_string(idx[2]) +
                                             ") has nonzero M but identically zero H");
    }
  }
}

double mixing_ratio(const Instance& inst, const WeightedFamily& fam, const ExponentParams& e) {
  const double den = weak_sup(inst, fam, e.p, Side::k);
  if (!(den > 0.0)) return -1.0;
  return mixed_norm(MixedFamilyValues::from(inst, fam), e) / den;
}

RatioBound mixing_lower_bound(const Instance& inst, const ExponentParams& e, const SamplingOptions& options) {
  const ExponentParams ex = ExponentParams::make(e.p, e.q, e.s);
  if (ex.p > ex.q) throw Error(ErrorKind::parameter, "mixing constants need p <= q");
  RatioBound best;
  bool found = false;
  auto consider = [&](const WeightedFamily& fam) {
    const double ratio = mixing_ratio(inst, fam, ex);
    if (ratio < 0.0) return false;
    ++best.evaluated;
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

namespace {

SimplexMeasure as_measure(const Vector& x) { return SimplexMeasure::normalized(x); }

DominationCertificate domination_at(const Instance& inst, const ExponentParams& e, const Vector& mu) {
  return pietsch_domination(mixing_probe_values(inst, mu, e.s), inst.h(), e.q);
}

}  // namespace

MixingUpperResult mixing_upper_domination(const Instance& inst, const ExponentParams& e, int grid_depth) {
  const ExponentParams ex = ExponentParams::make(e.p, e.q, e.s);
  if (ex.p != ex.q) throw Error(ErrorKind::parameter, "the measure form of the mixing constant needs p == q");
  const int n_w = inst.sizes().w;
  if (n_w > kMaxMixingPoints) {
    throw Error(ErrorKind::parameter, "W has " + std::to_string(n_w) + " points; the measure search supports at most " +
                                          std::to_string(kMaxMixingPoints));
  }
  require_mixing_support(inst);

  MixingUpperResult out;
  int evaluations = 0;
  auto delta = [&](const Vector& mu) {
    ++evaluations;
    return domination_at(inst, ex, as_measure(mu).weights()).delta;
  };

  SimplexSearchOptions search;
  search.grid_depth = grid_depth;
  const SimplexSearchResult found = maximize_on_simplex(n_w, delta, search);
  Vector mu = as_measure(found.point).weights();
  DominationCertificate cert = domination_at(inst, ex, mu);

  // Ascent by alternation: the LP dual at mu is a family, and that family's
  // optimal measure can only raise the domination constant.
  for (int round = 0; round < 20 && cert.delta > 0.0; ++round) {
    WeightedFamily fam;
    try {
      fam = witness_from_dual(inst, cert.probe_dual, ex.q);
    } catch (const Error&) {
      break;
    }
    Vector next;
    try {
      next = mixed_norm_sup_measure(MixedFamilyValues::from(inst, fam), ex).mu_star.weights();
    } catch (const OptimizationError&) {
      break;
    }
    DominationCertificate trial = domination_at(inst, ex, next);
    ++evaluations;
    if (!(trial.delta > cert.delta * (1.0 + 1e-15))) break;
    mu = next;
    cert = std::move(trial);
  }

  out.value = cert.delta;
  out.worst_mu = as_measure(mu);
  out.evaluations = evaluations + found.evaluations;
  if (cert.delta > 0.0) {
    try {
      out.witness = witness_from_dual(inst, cert.probe_dual, ex.q);
    } catch (const Error&) {
    }
  }
  out.certificate = std::move(cert);
  return out;
}

double SeminormBallModel::seminorm(const Vector& v) const {
  if (v.size() != d) throw Error(ErrorKind::model, "vector dimension does not match the seminorm");
  return (functionals * v).cwiseAbs().maxCoeff();
}

void SeminormBallModel::validate() const {
  if (d < 1) throw Error(ErrorKind::model, "seminorm dimension must be positive");
  if (functionals.rows() < 1 || functionals.cols() != d) throw Error(ErrorKind::model, "functionals must be r x d");
  if (vertices.rows() < 1 || vertices.cols() != d) throw Error(ErrorKind::model, "vertices must be n x d");
  if (m_coeff.cols() != d) throw Error(ErrorKind::model, "m_coeff must have d columns");
  if (!functionals.allFinite() || !vertices.allFinite() || !m_coeff.allFinite()) {
    throw Error(ErrorKind::model, "seminorm model entries must be finite");
  }
  for (Index i = 0; i < vertices.rows(); ++i) {
    const Vector v = vertices.row(i).transpose();
    if (std::abs(seminorm(v) - 1.0) > 1e-12) {
      throw Error(ErrorKind::model, "vertex " + std::to_string(i) + " is not on the unit sphere of P");
    }
    bool mirrored = false;
    for (Index j = 0; j < vertices.rows() && !mirrored; ++j) {
      mirrored = (vertices.row(j).transpose() + v).cwiseAbs().maxCoeff() <= 1e-12;
    }
    if (!mirrored) throw Error(ErrorKind::model, "vertex " + std::to_string(i) + " has no mirror image -v");
  }
}

void SeminormBallModel::check_instance(const Instance& inst) const {
  validate();
  if (m_coeff.rows() != inst.probe_count()) throw Error(ErrorKind::model, "m_coeff needs one row per probe");
  if (vertices.rows() != inst.sizes().w) throw Error(ErrorKind::model, "W points must be the ball vertices");
  const Matrix expected = m_coeff * vertices.transpose();
  for (Index i = 0; i < expected.rows(); ++i) {
    for (Index w = 0; w < expected.cols(); ++w) {
      if (std::abs(expected(i, w) - inst.m()(i, w)) > 1e-12 * (1.0 + std::abs(expected(i, w)))) {
        throw Error(ErrorKind::model, "M disagrees with the linear model at probe " + std::to_string(i) +
                                          ", vertex " + std::to_string(w));
      }
    }
  }
}

SeminormCheck check_seminorm_characterization(const Instance& inst, const SeminormBallModel& ball,
                                              const ExponentParams& e, double delta,
                                              const SeminormCheckOptions& options) {
  const ExponentParams ex = ExponentParams::make(e.p, e.q, e.s);
  ball.check_instance(inst);
  SeminormCheck out;
  bool any = false;

  auto evaluate = [&](const WeightedFamily& fam, const std::vector<int>& rows, double weak, const Matrix& tuple) {
    Vector p_values(tuple.rows());
    for (Index k = 0; k < tuple.rows(); ++k) p_values(k) = ball.seminorm(tuple.row(k).transpose());
    const double p_sum = lp_norm(p_values, ex.s);
    if (!(p_sum > 0.0)) return;
    Vector inner(static_cast<Index>(rows.size()));
    for (std::size_t j = 0; j < rows.size(); ++j) {
      inner(static_cast<Index>(j)) = lp_norm(tuple * ball.m_coeff.row(rows[j]).transpose(), ex.s);
    }
    const double ratio = weighted_lp(fam.sigma(), inner, ex.q) / (weak * p_sum);
    if (!any || ratio > out.max_ratio) {
      out.max_ratio = ratio;
      out.witness = fam;
      out.tuple = tuple;
      any = true;
    }
  };

  FamilySampler sampler(options.seed, options.max_family_size, options.log_sigma_range);
  auto run = [&](const WeightedFamily& fam) {
    const double weak = weak_sup(inst, fam, ex.p, Side::k);
    if (!(weak > 0.0)) return;
    const auto rows = fam.probes(inst);
    const MixedFamilyValues vals = MixedFamilyValues::from(inst, fam);
    Vector mu;
    if (ex.q == ex.s) {
      Index best = 0;
      Vector score(vals.points());
      for (Index w = 0; w < vals.points(); ++w) score(w) = weighted_lp(vals.sigma, vals.values.col(w), ex.q);
      score.maxCoeff(&best);
      mu = SimplexMeasure::dirac(static_cast<int>(best), static_cast<int>(vals.points())).weights();
    } else {
      mu = mixed_norm_sup_measure(vals, ex).mu_star.weights();
    }
    std::vector<Index> support;
    for (Index w = 0; w < mu.size(); ++w) {
      if (mu(w) > 0.0) support.push_back(w);
    }
    Matrix structured(static_cast<Index>(support.size()), ball.d);
    for (std::size_t k = 0; k < support.size(); ++k) {
      structured.row(static_cast<Index>(k)) = std::pow(mu(support[k]), 1.0 / ex.s) * ball.vertices.row(support[k]);
    }
    evaluate(fam, rows, weak, structured);
    for (int t = 0; t < options.random_tuples; ++t) {
      const int n = sampler.index(options.max_tuple_size) + 1;
      Matrix tuple(n, ball.d);
      for (Index i = 0; i < tuple.size(); ++i) tuple.data()[i] = sampler.normal();
      evaluate(fam, rows, weak, tuple);
    }
  };

  for (const auto& fam : options.injected) run(fam);
  for (int n = 0; n < options.samples; ++n) run(sampler.family(inst.sizes()));
  out.holds = out.max_ratio <= delta + 1e-9 * std::max(1.0, delta);
  return out;
}

namespace {

bool same(const Matrix& x, const Matrix& y) { return x.rows() == y.rows() && x.cols() == y.cols() && x == y; }

void check_shape(const Matrix& x, Index rows, Index cols, const char* name) {
  if (x.rows() != rows || x.cols() != cols) {
    throw Error(ErrorKind::parameter, std::string(name) + " must be " + std::to_string(rows) + " x " +
                                          std::to_string(cols));
  }
  if (!x.allFinite()) throw Error(ErrorKind::invariant, std::string(name) + " has non-finite entries");
}

}  // namespace

TwoLayerInstance::TwoLayerInstance(TwoLayerSizes sizes, std::vector<int> t_map, std::vector<int> c_map, Vector q1,
                                   Matrix h1, Matrix m1, Vector q2, Matrix h, Matrix m, Matrix m2)
    : sizes_(sizes),
      t_map_(std::move(t_map)),
      c_map_(std::move(c_map)),
      q1_(std::move(q1)),
      h1_(std::move(h1)),
      m1_(std::move(m1)),
      q2_(std::move(q2)),
      h_(std::move(h)),
      m_(std::move(m)),
      m2_(std::move(m2)) {
  const auto& z = sizes_;
  if (z.a < 1 || z.b < 1 || z.c < 1 || z.c1 < 1 || z.g < 1 || z.k < 1 || z.w < 1) {
    throw Error(ErrorKind::parameter, "two-layer sizes must be positive");
  }
  if (static_cast<int>(t_map_.size()) != z.a) throw Error(ErrorKind::parameter, "T_map needs one entry per a");
  if (static_cast<int>(c_map_.size()) != z.c) throw Error(ErrorKind::parameter, "c_map needs one entry per c");
  for (int v : t_map_) {
    if (v < 0 || v >= z.b) throw Error(ErrorKind::index, "T_map value out of range");
  }
  for (int v : c_map_) {
    if (v < 0 || v >= z.c1) throw Error(ErrorKind::index, "c_map value out of range");
  }
  const Index outer = static_cast<Index>(z.b) * z.c1 * z.g;
  const Index inner = static_cast<Index>(z.a) * z.c * z.g;
  check_shape(q1_, outer, 1, "Q1");
  check_shape(h1_, outer, z.w, "H1");
  check_shape(m1_, outer, z.w, "M1");
  check_shape(q2_, inner, 1, "Q2");
  check_shape(h_, inner, z.k, "H");
  check_shape(m_, inner, z.w, "M");
  check_shape(m2_, inner, z.w, "M2");
}

int TwoLayerInstance::image_probe(int inner) const {
  const int g = inner % sizes_.g;
  const int ac = inner / sizes_.g;
  const int a = ac / sizes_.c;
  const int c = ac % sizes_.c;
  return outer_probe(t_map_[static_cast<std::size_t>(a)], c_map_[static_cast<std::size_t>(c)], g);
}

Instance TwoLayerInstance::summing_layer() const {
  return Instance({sizes_.b, sizes_.c1, sizes_.g, sizes_.w, sizes_.w}, q1_, h1_, m1_);
}

Instance TwoLayerInstance::mixing_layer() const {
  return Instance({sizes_.a, sizes_.c, sizes_.g, sizes_.k, sizes_.w}, q2_, h_, m_);
}

Instance TwoLayerInstance::composite_layer() const {
  return Instance({sizes_.a, sizes_.c, sizes_.g, sizes_.k, sizes_.w}, q2_, h_, m2_);
}

bool operator==(const TwoLayerInstance& lhs, const TwoLayerInstance& rhs) {
  return lhs.sizes_ == rhs.sizes_ && lhs.t_map_ == rhs.t_map_ && lhs.c_map_ == rhs.c_map_ &&
         same(lhs.q1_, rhs.q1_) && same(lhs.h1_, rhs.h1_) && same(lhs.m1_, rhs.m1_) && same(lhs.q2_, rhs.q2_) &&
         same(lhs.h_, rhs.h_) && same(lhs.m_, rhs.m_) && same(lhs.m2_, rhs.m2_);
}

bool ConditionReport::admissible(double tol) const {
  return q_bound.worst <= tol && m_bound.worst <= tol && h_bound.worst <= tol;
}

ConditionReport check_conditions(const TwoLayerInstance& two) {
  ConditionReport report;
  report.q_bound.name = "|Q2| <= |Q1 o T|";
  report.m_bound.name = "|M2| <= |M1 o T|";
  report.h_bound.name = "|H1 o T| <= |M|";
  report.q_bound.worst = report.m_bound.worst = report.h_bound.worst = -kInfinity;
  const auto& z = two.sizes();
  auto note = [](ConditionResult& r, double diff, std::array<int, 4> where) {
    if (diff > r.worst) {
      r.worst = diff;
      r.where = where;
    }
  };
  for (int a = 0; a < z.a; ++a) {
    for (int c = 0; c < z.c; ++c) {
      for (int g = 0; g < z.g; ++g) {
        const int i = two.inner_probe(a, c, g);
        const int o = two.image_probe(i);
        note(report.q_bound, std::abs(two.q2()(i)) - std::abs(two.q1()(o)), {a, c, g, -1});
        for (int w = 0; w < z.w; ++w) {
          note(report.m_bound, std::abs(two.m2()(i, w)) - std::abs(two.m1()(o, w)), {a, c, g, w});
          note(report.h_bound, std::abs(two.h1()(o, w)) - std::abs(two.m()(i, w)), {a, c, g, w});
        }
      }
    }
  }
  return report;
}

namespace {

constexpr double kConditionTolerance = 1e-12;

void require_condition(const ConditionResult& r) {
  if (r.worst > kConditionTolerance) {
    std::string at = "(" + std::to_string(r.where[0]) + "," + std::to_string(r.where[1]) + "," +
                     std::to_string(r.where[2]);
    if (r.where[3] >= 0) at += "," + std::to_string(r.where[3]);
    throw Error(ErrorKind::precondition,
                "condition " + r.name + " violated by " + std::to_string(r.worst) + " at " + at + ")");
  }
}

/// Constants that do not exist on the instance count as infinite.
template <typename F>
double or_infinity(F&& f) {
  try {
    return f();
  } catch (const Error& err) {
    if (err.kind() == ErrorKind::not_summable || err.kind() == ErrorKind::not_mixing) return kInfinity;
    throw;
  }
}

double product(double x, double y) { return (x == 0.0 || y == 0.0) ? 0.0 : x * y; }

InequalityCheck compare(double lhs, double rhs, double tol) {
  return {lhs, rhs, lhs <= rhs * (1.0 + tol) + 1e-14};
}

}  // namespace

InequalityCheck check_composition_summing(const TwoLayerInstance& two, const ExponentParams& e, int grid_depth,
                                          double tol) {
  const ExponentParams ex = ExponentParams::mixing(e.q, e.s);
  const ConditionReport report = check_conditions(two);
  require_condition(report.q_bound);
  require_condition(report.h_bound);
  const double lhs = or_infinity([&] { return pietsch_norm_lp(two.composite_layer(), ex.q).delta; });
  const double outer = or_infinity([&] { return pietsch_norm_lp(two.summing_layer(), ex.s).delta; });
  const double inner = or_infinity([&] { return mixing_upper_domination(two.mixing_layer(), ex, grid_depth).value; });
  return compare(lhs, product(outer, inner), tol);
}

InequalityCheck check_inclusion(const Instance& inst, const ExponentParams& e1, const ExponentParams& e2,
                                int grid_depth, double tol) {
  if (!(e1.q <= e2.q && e2.q <= e2.s && e2.s <= e1.s)) {
    throw Error(ErrorKind::parameter, "inclusion needs q1 <= q2 <= s2 <= s1");
  }
  const ExponentParams x1 = ExponentParams::mixing(e1.q, e1.s);
  const ExponentParams x2 = ExponentParams::mixing(e2.q, e2.s);
  const double c1 = or_infinity([&] { return mixing_upper_domination(inst, x1, grid_depth).value; });
  const double c2 = or_infinity([&] { return mixing_upper_domination(inst, x2, grid_depth).value; });
  return compare(c2, c1, tol);
}

InequalityCheck check_composition_mixing(const TwoLayerInstance& two, double q, double s, double t, int grid_depth,
                                         double tol) {
  validate_positive(q, "q");
  validate_positive(s, "s");
  validate_positive(t, "t");
  if (!(q <= s && s <= t)) throw Error(ErrorKind::parameter, "composition of mixing maps needs q <= s <= t");
  const ConditionReport report = check_conditions(two);
  require_condition(report.m_bound);
  require_condition(report.h_bound);
  const double lhs = or_infinity(
      [&] { return mixing_upper_domination(two.composite_layer(), ExponentParams::mixing(q, t), grid_depth).value; });
  const double outer = or_infinity(
      [&] { return mixing_upper_domination(two.summing_layer(), ExponentParams::mixing(s, t), grid_depth).value; });
  const double inner = or_infinity(
      [&] { return mixing_upper_domination(two.mixing_layer(), ExponentParams::mixing(q, s), grid_depth).value; });
  return compare(lhs, product(outer, inner), tol);
}

}  // namespace mixlab
