#include "mixlab/mixed_norm.hpp"

#include <algorithm>
#include <limits>
#include <random>
#include <string>

namespace mixlab {

MixedFamilyValues::MixedFamilyValues(Vector s, Matrix v) : sigma(std::move(s)), values(std::move(v)) {
  if (sigma.size() < 1) throw Error(ErrorKind::parameter, "a family needs at least one entry");
  if (values.rows() != sigma.size()) throw Error(ErrorKind::parameter, "one row of M values per family element");
  if (values.cols() < 1) throw Error(ErrorKind::parameter, "empty W discretization");
  for (Index j = 0; j < sigma.size(); ++j) {
    if (sigma(j) == 0.0 || !std::isfinite(sigma(j))) {
      throw Error(ErrorKind::parameter, "family weights must be nonzero finite reals");
    }
  }
  if (!values.allFinite()) throw Error(ErrorKind::invariant, "M values must be finite");
  values = values.cwiseAbs();
}

MixedFamilyValues MixedFamilyValues::from(const Instance& inst, const WeightedFamily& fam) {
  return MixedFamilyValues(fam.sigma(), gather_rows(inst.m(), fam.probes(inst)));
}

double mixed_norm_closed_qq(const MixedFamilyValues& vals, double q) {
  validate_positive(q, "q");
  return weighted_lp_sup(vals.sigma, vals.values, q);
}

namespace {

void check_measure(const MixedFamilyValues& vals, const Vector& mu) {
  if (mu.size() != vals.points()) {
    throw Error(ErrorKind::parameter, "measure has " + std::to_string(mu.size()) + " weights, W has " +
                                          std::to_string(vals.points()) + " points");
  }
}

/// [sum_w mu_w M_jw^s]^(1/s) for each row.
Vector row_means(const MixedFamilyValues& vals, const Vector& mu, double s) {
  const Vector weights = mu.cwiseMax(0.0).array().pow(1.0 / s).matrix();
  Vector out(vals.size());
  for (Index j = 0; j < vals.size(); ++j) out(j) = weighted_lp(weights, vals.values.row(j).transpose(), s);
  return out;
}

std::vector<Index> nonzero_rows(const Matrix& values) {
  std::vector<Index> rows;
  for (Index j = 0; j < values.rows(); ++j) {
    if (values.row(j).maxCoeff() > 0.0) rows.push_back(j);
  }
  return rows;
}

/// Concave objective F(mu) = sum_j c_j (A mu)_j^alpha on the simplex, with
/// A and c normalized to entries in [0, 1].
struct Concave {
  Matrix a;
  Vector c;
  double alpha;

  double value(const Vector& mu) const {
    const Vector l = a * mu;
    double f = 0.0;
    for (Index j = 0; j < l.size(); ++j) f += c(j) * std::pow(std::max(l(j), 0.0), alpha);
    return f;
  }

  Vector gradient(const Vector& l) const {
    Vector g = Vector::Zero(a.cols());
    for (Index j = 0; j < l.size(); ++j) {
      const double w = l(j) > 0.0 ? c(j) * alpha * std::pow(l(j), alpha - 1.0) : kInfinity;
      for (Index k = 0; k < a.cols(); ++k) {
        if (a(j, k) > 0.0) g(k) += w * a(j, k);
      }
    }
    return g;
  }

  /// d/dgamma F(mu + gamma d) given l = A mu and ad = A d.
  double slope(const Vector& l, const Vector& ad, double gamma) const {
    double out = 0.0;
    for (Index j = 0; j < l.size(); ++j) {
      if (ad(j) == 0.0) continue;
      const double lj = l(j) + gamma * ad(j);
      if (lj <= 0.0) return ad(j) > 0.0 ? kInfinity : -kInfinity;
      out += c(j) * alpha * std::pow(lj, alpha - 1.0) * ad(j);
    }
    return out;
  }
};

double exact_line_search(const Concave& f, const Vector& l, const Vector& ad) {
  if (f.slope(l, ad, 1.0) >= 0.0) return 1.0;
  double lo = 0.0;
  double hi = 1.0;
  for (int it = 0; it < 100 && hi - lo > 1e-17; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (f.slope(l, ad, mid) > 0.0) lo = mid;
    else hi = mid;
  }
  return lo;
}

/// One Newton step for max F restricted to the support face of mu.
bool face_newton(const Concave& f, Vector& mu) {
  std::vector<Index> face;
  for (Index k = 0; k < mu.size(); ++k) {
    if (mu(k) > 0.0) face.push_back(k);
  }
  const Index n = static_cast<Index>(face.size());
  if (n < 2) return false;

  const Vector l = f.a * mu;
  if (l.minCoeff() <= 0.0) return false;
  Vector g(n);
  Matrix h = Matrix::Zero(n, n);
  for (Index j = 0; j < l.size(); ++j) {
    const double d1 = f.c(j) * f.alpha * std::pow(l(j), f.alpha - 1.0);
    const double d2 = f.c(j) * f.alpha * (f.alpha - 1.0) * std::pow(l(j), f.alpha - 2.0);
    Vector row(n);
    for (Index i = 0; i < n; ++i) row(i) = f.a(j, face[i]);
    h.noalias() += d2 * row * row.transpose();
    if (j == 0) g = d1 * row;
    else g += d1 * row;
  }
  const double reg = 1e-13 * (1.0 + h.cwiseAbs().maxCoeff());
  Matrix kkt = Matrix::Zero(n + 1, n + 1);
  kkt.topLeftCorner(n, n) = h - reg * Matrix::Identity(n, n);
  kkt.block(0, n, n, 1).setOnes();
  kkt.block(n, 0, 1, n).setOnes();
  Vector rhs = Vector::Zero(n + 1);
  rhs.head(n) = -g;
  const Vector sol = kkt.fullPivLu().solve(rhs);
  Vector d = sol.head(n);
  d.array() -= d.mean();
  if (!d.allFinite() || g.dot(d) <= 0.0) return false;

  double t_max = 1.0;
  Index blocking = -1;
  for (Index i = 0; i < n; ++i) {
    if (d(i) < 0.0 && -mu(face[i]) / d(i) < t_max) {
      t_max = -mu(face[i]) / d(i);
      blocking = i;
    }
  }
  const double f0 = f.value(mu);
  double t = t_max;
  for (int it = 0; it < 40; ++it, t *= 0.5) {
    Vector trial = mu;
    for (Index i = 0; i < n; ++i) trial(face[i]) += t * d(i);
    if (t == t_max && blocking >= 0) trial(face[blocking]) = 0.0;
    trial = trial.cwiseMax(0.0);
    trial /= trial.sum();
    // Near the optimum F is flat to rounding; accept steps that do not
    // lose more than a few ulps.
    if ((f.a * trial).minCoeff() <= 0.0) continue;
    const double slack = blocking >= 0 && t == t_max ? 0.0 : 4.0 * std::numeric_limits<double>::epsilon();
    if (f.value(trial) >= f0 - slack * std::abs(f0)) {
      mu = trial;
      return true;
    }
  }
  return false;
}

}  // namespace

double mixed_objective(const MixedFamilyValues& vals, const ExponentParams& e, const Vector& mu) {
  check_measure(vals, mu);
  return weighted_lp(vals.sigma, row_means(vals, mu, e.s), e.q);
}

MixedNormResult mixed_norm_sup_measure(const MixedFamilyValues& vals, const ExponentParams& e,
                                       const SupMeasureOptions& options) {
  const ExponentParams ex = ExponentParams::make(e.p, e.q, e.s);
  const Index n_w = vals.points();
  MixedNormResult result;
  result.tau = Vector::Ones(vals.size());

  const auto rows = nonzero_rows(vals.values);
  if (rows.empty()) {
    result.mu_star = SimplexMeasure::uniform(static_cast<int>(n_w));
    return result;
  }

  const double m_max = vals.values.maxCoeff();
  double s_max = 0.0;
  for (Index j : rows) s_max = std::max(s_max, std::abs(vals.sigma(j)));
  Concave f;
  f.alpha = ex.q / ex.s;
  f.a.resize(static_cast<Index>(rows.size()), n_w);
  f.c.resize(static_cast<Index>(rows.size()));
  for (std::size_t r = 0; r < rows.size(); ++r) {
    const Index j = rows[r];
    f.a.row(static_cast<Index>(r)) = (vals.values.row(j) / m_max).array().pow(ex.s).matrix();
    f.c(static_cast<Index>(r)) = std::pow(std::abs(vals.sigma(j)) / s_max, ex.q);
  }
  auto finish = [&](const Vector& mu, double big_f, double gap) {
    result.mu_star = SimplexMeasure::normalized(mu);
    result.value = mixed_objective(vals, ex, result.mu_star.weights());
    result.gap = big_f > 0.0 ? std::pow(1.0 + gap / big_f, 1.0 / ex.q) - 1.0 : 0.0;
    result.tau = tau_from_measure(vals, ex, result.mu_star, 1e-9).tau;
    return result;
  };

  if (n_w == 1) return finish(Vector::Ones(1), f.value(Vector::Ones(1)), 0.0);
  if (f.alpha == 1.0) {
    const Vector score = f.a.transpose() * f.c;
    Index best = 0;
    score.maxCoeff(&best);
    return finish(SimplexMeasure::dirac(static_cast<int>(best), static_cast<int>(n_w)).weights(),
                  score(best), 0.0);
  }

  Vector mu = Vector::Constant(n_w, 1.0 / static_cast<double>(n_w));
  double big_f = f.value(mu);
  double gap = kInfinity;
  for (int it = 0; it < options.max_iterations; ++it) {
    result.iterations = it + 1;
    const Vector l = f.a * mu;
    const Vector g = f.gradient(l);
    Index vertex = 0;
    const double g_max = g.maxCoeff(&vertex);
    gap = std::isfinite(g_max) ? std::max(g_max - g.dot(mu), 0.0) : kInfinity;
    if (gap <= options.gap_tolerance * big_f) return finish(mu, big_f, gap);

    Vector d = -mu;
    d(vertex) += 1.0;
    const double gamma = exact_line_search(f, l, f.a * d);
    Vector next = mu + gamma * d;
    next = next.cwiseMax(0.0);
    next /= next.sum();
    mu = next;
    for (int polish = 0; polish < 3 && face_newton(f, mu); ++polish) {
    }
    big_f = f.value(mu);
  }
  const double best = mixed_objective(vals, ex, SimplexMeasure::normalized(mu).weights());
  throw OptimizationError("sup-measure iteration cap reached", best,
                          std::pow(1.0 + gap / big_f, 1.0 / ex.q) - 1.0);
}

double mixed_norm(const MixedFamilyValues& vals, const ExponentParams& e) {
  if (e.q == e.s) return mixed_norm_closed_qq(vals, e.q);
  return mixed_norm_sup_measure(vals, e).value;
}

double tau_product(const MixedFamilyValues& vals, const ExponentParams& e, const Vector& tau) {
  if (tau.size() != vals.size()) throw Error(ErrorKind::parameter, "one tau per family element");
  const auto rows = nonzero_rows(vals.values);
  if (rows.empty()) return 0.0;
  Vector t(static_cast<Index>(rows.size()));
  Vector scaled(static_cast<Index>(rows.size()));
  Matrix m(static_cast<Index>(rows.size()), vals.points());
  for (std::size_t r = 0; r < rows.size(); ++r) {
    const Index j = rows[r];
    if (!(tau(j) > 0.0) || !std::isfinite(tau(j))) throw Error(ErrorKind::parameter, "tau must be positive");
    t(static_cast<Index>(r)) = tau(j);
    scaled(static_cast<Index>(r)) = std::abs(vals.sigma(j)) / tau(j);
    m.row(static_cast<Index>(r)) = vals.values.row(j);
  }
  const double norm_tau = e.r_infinite() ? t.maxCoeff() : lp_norm(t, e.r());
  return norm_tau * weighted_lp_sup(scaled, m, e.s);
}

TauProduct tau_from_measure(const MixedFamilyValues& vals, const ExponentParams& e,
                            const SimplexMeasure& mu, double eps) {
  if (!(eps > 0.0) || !std::isfinite(eps)) throw Error(ErrorKind::parameter, "eps must be positive");
  check_measure(vals, mu.weights());
  // 1/(u v) = q^2 / (r s), which vanishes when r is infinite.
  const double expo = e.r_infinite() ? 0.0 : e.q * e.q / (e.r() * e.s);
  const Vector means = row_means(vals, mu.weights(), e.s);
  TauProduct out;
  out.tau = Vector::Ones(vals.size());
  for (Index j = 0; j < vals.size(); ++j) {
    if (vals.values.row(j).maxCoeff() <= 0.0) continue;
    const double base = std::abs(vals.sigma(j)) * means(j);
    const double xi = expo == 0.0 ? 1.0 : std::pow(base, e.s * expo);
    out.tau(j) = std::pow(xi + eps, 1.0 / e.q);
  }
  out.product = tau_product(vals, e, out.tau);
  return out;
}

TauLadder tau_ladder(const MixedFamilyValues& vals, const ExponentParams& e, const SimplexMeasure& mu,
                     double eps_max, double eps_min) {
  if (!(eps_min > 0.0) || !(eps_max >= eps_min)) throw Error(ErrorKind::parameter, "bad eps ladder");
  TauLadder ladder;
  for (double eps = eps_max; eps >= eps_min * (1.0 - 1e-9); eps /= 10.0) {
    ladder.eps.push_back(eps);
    ladder.products.push_back(tau_from_measure(vals, e, mu, eps).product);
  }
  const std::size_t n = ladder.products.size();
  if (n == 1) {
    ladder.extrapolated = ladder.products[0];
  } else {
    const double e1 = ladder.eps[n - 2];
    const double e2 = ladder.eps[n - 1];
    const double p1 = ladder.products[n - 2];
    const double p2 = ladder.products[n - 1];
    ladder.extrapolated = p2 - (p1 - p2) * e2 / (e1 - e2);
  }
  return ladder;
}

namespace {

/// log sum_i exp(z_i), with the softmax weights written to `weights`.
double log_sum_exp(const Vector& z, Vector& weights) {
  const double top = z.maxCoeff();
  weights = (z.array() - top).exp().matrix();
  const double total = weights.sum();
  weights /= total;
  return top + std::log(total);
}

/// log of tau_product as a convex function of x = log(tau) over the nonzero
/// rows, in epigraph form  g0(x) + z  with  z >= h_w(x)  for every W point.
struct LogProduct {
  Vector log_sigma;          // per row
  Matrix log_m;              // rows x points, -inf where M vanishes
  std::vector<Index> points; // W points with some nonzero entry
  double r = 1.0;
  double s = 1.0;

  Index rows() const { return log_sigma.size(); }

  double g0(const Vector& x, Vector& grad, Matrix& hess) const {
    Vector w;
    const double v = log_sum_exp(r * x, w) / r;
    grad = w;
    hess = r * (Matrix(w.asDiagonal()) - w * w.transpose());
    return v;
  }

  double h(Index pt, const Vector& x, Vector& grad, Matrix& hess) const {
    std::vector<Index> live;
    for (Index j = 0; j < rows(); ++j) {
      if (std::isfinite(log_m(j, pt))) live.push_back(j);
    }
    Vector z(static_cast<Index>(live.size()));
    for (std::size_t i = 0; i < live.size(); ++i) {
      const Index j = live[i];
      z(static_cast<Index>(i)) = s * (log_sigma(j) + log_m(j, pt) - x(j));
    }
    Vector w;
    const double v = log_sum_exp(z, w) / s;
    Vector rho = Vector::Zero(rows());
    for (std::size_t i = 0; i < live.size(); ++i) rho(live[i]) = w(static_cast<Index>(i));
    grad = -rho;
    hess = s * (Matrix(rho.asDiagonal()) - rho * rho.transpose());
    return v;
  }

  double value(const Vector& x) const {
    Vector g;
    Matrix hs;
    double worst = -kInfinity;
    for (Index pt : points) worst = std::max(worst, h(pt, x, g, hs));
    return g0(x, g, hs) + worst;
  }
};

/// Barrier objective t (g0 + z) - sum_w log(z - h_w) on y = (x_free, z),
/// with the last row's x fixed at 0.
struct Barrier {
  const LogProduct& lp;
  double t;

  Vector expand(const Vector& y) const {
    Vector x = Vector::Zero(lp.rows());
    x.head(lp.rows() - 1) = y.head(lp.rows() - 1);
    return x;
  }

  bool eval(const Vector& y, double& value, Vector* grad, Matrix* hess) const {
    const Index n = lp.rows() - 1;
    const Vector x = expand(y);
    const double z = y(n);
    Vector gx;
    Matrix hx;
    const double g0 = lp.g0(x, gx, hx);
    value = t * (g0 + z);
    Vector gr = Vector::Zero(n + 1);
    Matrix he = Matrix::Zero(n + 1, n + 1);
    gr.head(n) = t * gx.head(n);
    gr(n) = t;
    he.topLeftCorner(n, n) = t * hx.topLeftCorner(n, n);
    for (Index pt : lp.points) {
      const double hw = lp.h(pt, x, gx, hx);
      const double d = z - hw;
      if (!(d > 0.0)) return false;
      value -= std::log(d);
      Vector a(n + 1);
      a.head(n) = gx.head(n);
      a(n) = -1.0;
      gr += a / d;
      he += a * a.transpose() / (d * d);
      he.topLeftCorner(n, n) += hx.topLeftCorner(n, n) / d;
    }
    if (grad) *grad = gr;
    if (hess) *hess = he;
    return true;
  }
};

Vector barrier_minimize(const LogProduct& lp, Vector x) {
  const Index n = lp.rows() - 1;
  x.array() -= x(n);
  Vector y(n + 1);
  y.head(n) = x.head(n);
  {
    Vector g;
    Matrix h;
    double worst = -kInfinity;
    for (Index pt : lp.points) worst = std::max(worst, lp.h(pt, x, g, h));
    y(n) = worst + 1.0;
  }
  const double m = static_cast<double>(lp.points.size());
  for (double t = 1.0; m / t > 1e-10; t *= 20.0) {
    const Barrier b{lp, t};
    for (int it = 0; it < 60; ++it) {
      double v = 0.0;
      Vector g;
      Matrix h;
      b.eval(y, v, &g, &h);
      Eigen::LDLT<Matrix> ldlt(h);
      Vector step = ldlt.solve(-g);
      if (ldlt.info() != Eigen::Success || !step.allFinite() || g.dot(step) >= 0.0) {
        const double reg = 1e-10 * (1.0 + h.cwiseAbs().maxCoeff());
        step = (h + reg * Matrix::Identity(n + 1, n + 1)).ldlt().solve(-g);
        if (!step.allFinite() || g.dot(step) >= 0.0) step = -g;
      }
      const double decrement = -g.dot(step);
      if (decrement < 1e-10) break;
      double alpha = 1.0;
      bool moved = false;
      for (int ls = 0; ls < 60; ++ls, alpha *= 0.5) {
        double trial = 0.0;
        if (b.eval(y + alpha * step, trial, nullptr, nullptr) && trial <= v - 0.25 * alpha * decrement) {
          y += alpha * step;
          moved = true;
          break;
        }
      }
      if (!moved) break;
    }
  }
  Vector out = Vector::Zero(lp.rows());
  out.head(n) = y.head(n);
  return out;
}

}  // namespace

double mixed_norm_tau_search(const MixedFamilyValues& vals, const ExponentParams& e, int restarts,
                             std::uint64_t seed) {
  if (!(e.q < e.s)) throw Error(ErrorKind::parameter, "tau search needs q < s");
  const auto rows = nonzero_rows(vals.values);
  if (rows.empty()) return 0.0;
  if (rows.size() == 1) {
    const Index j = rows[0];
    return std::abs(vals.sigma(j)) * vals.values.row(j).maxCoeff();
  }

  LogProduct lp;
  lp.r = e.r();
  lp.s = e.s;
  const Index n = static_cast<Index>(rows.size());
  lp.log_sigma.resize(n);
  lp.log_m.resize(n, vals.points());
  for (Index r = 0; r < n; ++r) {
    const Index j = rows[static_cast<std::size_t>(r)];
    lp.log_sigma(r) = std::log(std::abs(vals.sigma(j)));
    for (Index w = 0; w < vals.points(); ++w) {
      const double v = vals.values(j, w);
      lp.log_m(r, w) = v > 0.0 ? std::log(v) : -kInfinity;
    }
  }
  for (Index w = 0; w < vals.points(); ++w) {
    if (vals.values.col(w).maxCoeff() > 0.0) lp.points.push_back(w);
  }

  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  double best = kInfinity;
  Vector tau_full = Vector::Ones(vals.size());
  for (int restart = 0; restart < std::max(restarts, 1); ++restart) {
    Vector x0 = Vector::Zero(n);
    if (restart > 0) {
      for (Index j = 0; j < n; ++j) x0(j) = normal(rng);
    }
    const Vector x = barrier_minimize(lp, x0);
    for (Index r = 0; r < n; ++r) tau_full(rows[static_cast<std::size_t>(r)]) = std::exp(x(r));
    best = std::min(best, tau_product(vals, e, tau_full));
  }
  return best;
}

}  // namespace mixlab
