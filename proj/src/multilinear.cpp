#include "mixlab/multilinear.hpp"

#include <functional>
#include <numeric>
#include <string>

#include "mixlab/sampling.hpp"

namespace mixlab {

namespace {

int product_of(const std::vector<int>& sizes) {
  return std::accumulate(sizes.begin(), sizes.end(), 1, std::multiplies<int>());
}

bool same(const Matrix& x, const Matrix& y) { return x.rows() == y.rows() && x.cols() == y.cols() && x == y; }

}  // namespace

int MultilinearSizes::joint_a() const { return product_of(a); }
int MultilinearSizes::joint_c() const { return product_of(c); }
int MultilinearSizes::joint_g() const { return product_of(g); }

MultilinearInstance::MultilinearInstance(MultilinearSizes sizes, std::vector<Matrix> h, Matrix m, Vector p, double q,
                                         double s)
    : sizes_(std::move(sizes)), h_(std::move(h)), m_(std::move(m)), p_(std::move(p)), q_(q), s_(s) {
  auto positive = [](const std::vector<int>& v, const char* name) {
    if (v.empty()) throw Error(ErrorKind::parameter, std::string(name) + " needs at least one factor");
    for (int x : v) {
      if (x < 1) throw Error(ErrorKind::parameter, std::string(name) + " factor sizes must be positive");
    }
  };
  positive(sizes_.a, "A");
  positive(sizes_.c, "C");
  positive(sizes_.g, "G");
  positive(sizes_.k, "K");
  if (sizes_.w < 1) throw Error(ErrorKind::parameter, "W size must be positive");
  if (sizes_.g.size() != sizes_.k.size()) throw Error(ErrorKind::parameter, "one G factor per kernel");
  ExponentParams::make(q_, q_, s_);
  const int n = sizes_.kernels();
  if (static_cast<int>(h_.size()) != n) throw Error(ErrorKind::parameter, "one H tensor per kernel");
  if (p_.size() != n) throw Error(ErrorKind::parameter, "one exponent p_k per kernel");
  const Index ac = static_cast<Index>(sizes_.joint_a()) * sizes_.joint_c();
  for (int k = 0; k < n; ++k) {
    validate_positive(p_(k), "p_k");
    if (p_(k) > q_) throw Error(ErrorKind::parameter, "every p_k must be <= q");
    const Index rows = ac * sizes_.g[static_cast<std::size_t>(k)];
    if (h_[static_cast<std::size_t>(k)].rows() != rows || h_[static_cast<std::size_t>(k)].cols() != sizes_.k[static_cast<std::size_t>(k)]) {
      throw Error(ErrorKind::parameter, "H_" + std::to_string(k + 1) + " has wrong shape");
    }
    if (!h_[static_cast<std::size_t>(k)].allFinite()) {
      throw Error(ErrorKind::invariant, "H_" + std::to_string(k + 1) + " has non-finite entries");
    }
  }
  if (m_.rows() != ac * sizes_.joint_g() || m_.cols() != sizes_.w) throw Error(ErrorKind::parameter, "M has wrong shape");
  if (!m_.allFinite()) throw Error(ErrorKind::invariant, "M has non-finite entries");
}

int MultilinearInstance::h_row(int kernel, int a, int c, int g) const {
  return (a * sizes_.joint_c() + c) * sizes_.g[static_cast<std::size_t>(kernel)] + g;
}

int MultilinearInstance::m_row(int a, int c, const std::vector<int>& g) const {
  int jg = 0;
  for (std::size_t k = 0; k < g.size(); ++k) jg = jg * sizes_.g[k] + g[k];
  return (a * sizes_.joint_c() + c) * sizes_.joint_g() + jg;
}

void MultilinearInstance::validate(const MultiFamily& fam) const {
  if (fam.empty()) throw Error(ErrorKind::parameter, "a family needs at least one entry");
  for (const auto& e : fam) {
    if (e.sigma == 0.0 || !std::isfinite(e.sigma)) throw Error(ErrorKind::parameter, "family weights must be nonzero");
    if (e.a < 0 || e.a >= sizes_.joint_a() || e.c < 0 || e.c >= sizes_.joint_c()) {
      throw Error(ErrorKind::index, "family index out of range");
    }
    if (static_cast<int>(e.g.size()) != sizes_.kernels()) throw Error(ErrorKind::index, "one g index per kernel");
    for (std::size_t k = 0; k < e.g.size(); ++k) {
      if (e.g[k] < 0 || e.g[k] >= sizes_.g[k]) throw Error(ErrorKind::index, "g index out of range");
    }
  }
}

bool operator==(const MultilinearInstance& lhs, const MultilinearInstance& rhs) {
  if (!(lhs.sizes_ == rhs.sizes_) || lhs.h_.size() != rhs.h_.size()) return false;
  for (std::size_t k = 0; k < lhs.h_.size(); ++k) {
    if (!same(lhs.h_[k], rhs.h_[k])) return false;
  }
  return same(lhs.m_, rhs.m_) && same(lhs.p_, rhs.p_) && lhs.q_ == rhs.q_ && lhs.s_ == rhs.s_;
}

MixedFamilyValues multi_values(const MultilinearInstance& mi, const MultiFamily& fam) {
  mi.validate(fam);
  Vector sigma(static_cast<Index>(fam.size()));
  std::vector<int> rows;
  for (std::size_t j = 0; j < fam.size(); ++j) {
    sigma(static_cast<Index>(j)) = fam[j].sigma;
    rows.push_back(mi.m_row(fam[j].a, fam[j].c, fam[j].g));
  }
  return MixedFamilyValues(std::move(sigma), gather_rows(mi.m(), rows));
}

double multi_weak_product(const MultilinearInstance& mi, const MultiFamily& fam) {
  mi.validate(fam);
  Vector sigma(static_cast<Index>(fam.size()));
  for (std::size_t j = 0; j < fam.size(); ++j) sigma(static_cast<Index>(j)) = fam[j].sigma;
  double out = 1.0;
  for (int k = 0; k < mi.sizes().kernels(); ++k) {
    std::vector<int> rows;
    for (const auto& e : fam) rows.push_back(mi.h_row(k, e.a, e.c, e.g[static_cast<std::size_t>(k)]));
    out *= weighted_lp_sup(sigma, gather_rows(mi.h()[static_cast<std::size_t>(k)], rows), mi.p()(k));
  }
  return out;
}

double multi_mixing_ratio(const MultilinearInstance& mi, const MultiFamily& fam) {
  const double den = multi_weak_product(mi, fam);
  if (!(den > 0.0)) return -1.0;
  return mixed_norm(multi_values(mi, fam), mi.exponents()) / den;
}

namespace {

MultiFamily draw(FamilySampler& sampler, const MultilinearSizes& sizes) {
  const int m = sampler.size();
  MultiFamily fam;
  fam.reserve(static_cast<std::size_t>(m));
  for (int j = 0; j < m; ++j) {
    MultiEntry e;
    e.a = sampler.index(sizes.joint_a());
    e.c = sampler.index(sizes.joint_c());
    for (int gk : sizes.g) e.g.push_back(sampler.index(gk));
    e.sigma = sampler.sigma();
    fam.push_back(std::move(e));
  }
  return fam;
}

}  // namespace

MultiRatioBound multi_mixing_lower_bound(const MultilinearInstance& mi, const MultiSamplingOptions& options) {
  MultiRatioBound best;
  bool found = false;
  auto consider = [&](const MultiFamily& fam) {
    const double ratio = multi_mixing_ratio(mi, fam);
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
      if (consider(draw(sampler, mi.sizes()))) break;
    }
  }
  if (!found) throw Error(ErrorKind::degenerate, "every sampled family has a vanishing weak product");
  return best;
}

MultiCheck multi_characterization_check(const MultilinearInstance& mi, const SeminormBallModel& ball, double delta,
                                        const MultiCheckOptions& options) {
  ball.validate();
  const ExponentParams ex = mi.exponents();
  if (ball.m_coeff.rows() != mi.m().rows()) throw Error(ErrorKind::model, "m_coeff needs one row per M row");
  if (ball.vertices.rows() != mi.sizes().w) throw Error(ErrorKind::model, "W points must be the ball vertices");
  const Matrix expected = ball.m_coeff * ball.vertices.transpose();
  if ((expected - mi.m()).cwiseAbs().maxCoeff() > 1e-12 * (1.0 + expected.cwiseAbs().maxCoeff())) {
    throw Error(ErrorKind::model, "M disagrees with the linear model");
  }
  const bool closed = ex.q == ex.s && options.path == CasePath::closed_form;

  MultiCheck out;
  bool any = false;
  auto keep = [&](const MultiFamily& fam, double ratio) {
    if (!any || ratio > out.max_ratio) {
      out.max_ratio = ratio;
      out.witness = fam;
      any = true;
    }
  };
  auto evaluate = [&](const MultiFamily& fam, const Vector& sigma, const std::vector<int>& rows, double den,
                      const Matrix& tuple) {
    Vector p_values(tuple.rows());
    for (Index k = 0; k < tuple.rows(); ++k) p_values(k) = ball.seminorm(tuple.row(k).transpose());
    const double p_sum = lp_norm(p_values, ex.s);
    if (!(p_sum > 0.0)) return;
    Vector inner(static_cast<Index>(rows.size()));
    for (std::size_t j = 0; j < rows.size(); ++j) {
      inner(static_cast<Index>(j)) = lp_norm(tuple * ball.m_coeff.row(rows[j]).transpose(), ex.s);
    }
    keep(fam, weighted_lp(sigma, inner, ex.q) / (den * p_sum));
  };

  FamilySampler sampler(options.seed, options.max_family_size, options.log_sigma_range);
  auto run = [&](const MultiFamily& fam) {
    const double den = multi_weak_product(mi, fam);
    if (!(den > 0.0)) return;
    const MixedFamilyValues vals = multi_values(mi, fam);
    std::vector<int> rows;
    for (const auto& e : fam) rows.push_back(mi.m_row(e.a, e.c, e.g));
    if (closed) {
      keep(fam, mixed_norm_closed_qq(vals, ex.q) / den);
    } else {
      Vector mu;
      if (ex.q == ex.s && options.path == CasePath::automatic) {
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
      evaluate(fam, vals.sigma, rows, den, structured);
    }
    for (int t = 0; t < options.random_tuples; ++t) {
      const int n = sampler.index(options.max_tuple_size) + 1;
      Matrix tuple(n, ball.d);
      for (Index i = 0; i < tuple.size(); ++i) tuple.data()[i] = sampler.normal();
      evaluate(fam, vals.sigma, rows, den, tuple);
    }
  };

  for (const auto& fam : options.injected) run(fam);
  for (int n = 0; n < options.samples; ++n) run(draw(sampler, mi.sizes()));
  out.holds = out.max_ratio <= delta + 1e-9 * std::max(1.0, delta);
  return out;
}

Instance reduce_t1(const MultilinearInstance& mi) {
  const auto& z = mi.sizes();
  if (z.a.size() != 1) throw Error(ErrorKind::parameter, "reduction needs exactly one A factor");
  if (z.kernels() != 1) throw Error(ErrorKind::parameter, "reduction needs exactly one kernel");
  const InstanceSizes sizes{z.a[0], z.joint_c(), z.g[0], z.k[0], z.w};
  return Instance(sizes, Vector::Zero(sizes.probes()), mi.h()[0], mi.m());
}

MultiFamily lift_family(const WeightedFamily& fam, const Instance& inst) {
  fam.probes(inst);
  MultiFamily out;
  for (const auto& e : fam.entries()) out.push_back(MultiEntry{e.sigma, e.a, e.c, {e.g}});
  return out;
}

WeightedFamily lower_family(const MultiFamily& fam, const Instance& inst) {
  std::vector<FamilyEntry> entries;
  for (const auto& e : fam) {
    if (e.g.size() != 1) throw Error(ErrorKind::parameter, "only single-kernel families lower");
    entries.push_back(FamilyEntry{e.sigma, e.a, e.c, e.g[0]});
  }
  WeightedFamily out(std::move(entries));
  out.probes(inst);
  return out;
}

}  // namespace mixlab
