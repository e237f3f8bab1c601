#include "mixlab/adapters.hpp"

#include <algorithm>
#include <string>

#include "mixlab/lp.hpp"
#include "mixlab/simplex_search.hpp"

namespace mixlab {

namespace {

constexpr double kNetTolerance = 1e-12;

void check_finite(const Matrix& x, const char* name) {
  if (!x.allFinite()) throw Error(ErrorKind::invariant, std::string(name) + " has non-finite entries");
}

}  // namespace

void LinearOperatorSpec::validate() const {
  if (t.rows() < 1 || t.cols() < 1) throw Error(ErrorKind::parameter, "operator matrix must be nonempty");
  if (k_net.rows() < 1 || w_net.rows() < 1) throw Error(ErrorKind::parameter, "nets must be nonempty");
  if (probes.rows() < 1) throw Error(ErrorKind::parameter, "probe set must be nonempty");
  if (k_net.cols() != t.cols()) throw Error(ErrorKind::parameter, "K net functionals must act on the domain");
  if (w_net.cols() != t.rows()) throw Error(ErrorKind::parameter, "W net functionals must act on the codomain");
  if (probes.cols() != t.cols()) throw Error(ErrorKind::parameter, "probes must be domain vectors");
  check_finite(t, "T");
  check_finite(k_net, "K net");
  check_finite(w_net, "W net");
  check_finite(probes, "probes");
  for (Index i = 0; i < k_net.rows(); ++i) {
    if (k_net.row(i).lpNorm<1>() > 1.0 + kNetTolerance) {
      throw Error(ErrorKind::invariant, "K net functional " + std::to_string(i) + " lies outside the dual unit ball");
    }
  }
  for (Index i = 0; i < w_net.rows(); ++i) {
    if (w_net.row(i).lpNorm<1>() > 1.0 + kNetTolerance) {
      throw Error(ErrorKind::invariant, "W net functional " + std::to_string(i) + " lies outside the dual unit ball");
    }
  }
}

Matrix coordinate_net(int n) {
  if (n < 1) throw Error(ErrorKind::parameter, "dimension must be positive");
  Matrix out = Matrix::Zero(2 * n, n);
  for (int i = 0; i < n; ++i) {
    out(2 * i, i) = 1.0;
    out(2 * i + 1, i) = -1.0;
  }
  return out;
}

Matrix default_probes(int n) {
  if (n < 1) throw Error(ErrorKind::parameter, "dimension must be positive");
  std::vector<Vector> rows;
  for (int i = 0; i < n; ++i) rows.push_back(Vector::Unit(n, i));
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      rows.push_back(Vector::Unit(n, i) + Vector::Unit(n, j));
      rows.push_back(Vector::Unit(n, i) - Vector::Unit(n, j));
    }
  }
  Matrix out(static_cast<Index>(rows.size()), n);
  for (std::size_t r = 0; r < rows.size(); ++r) out.row(static_cast<Index>(r)) = rows[r].transpose();
  return out;
}

Instance build_linear_instance(const LinearOperatorSpec& spec) {
  spec.validate();
  const Index n_a = spec.probes.rows();
  const Matrix h = spec.probes * spec.k_net.transpose();
  const Matrix m = spec.probes * spec.t.transpose() * spec.w_net.transpose();
  Vector q(n_a);
  for (Index a = 0; a < n_a; ++a) q(a) = m.row(a).cwiseAbs().maxCoeff();
  const InstanceSizes sizes{static_cast<int>(n_a), 1, 1, static_cast<int>(spec.k_net.rows()),
                            static_cast<int>(spec.w_net.rows())};
  return Instance(sizes, q, h, m);
}

void validate_metric(const Matrix& d, const char* name) {
  const std::string n(name);
  if (d.rows() < 1 || d.rows() != d.cols()) throw Error(ErrorKind::parameter, n + " must be a square matrix");
  check_finite(d, name);
  for (Index i = 0; i < d.rows(); ++i) {
    if (d(i, i) != 0.0) throw Error(ErrorKind::invariant, n + " has a nonzero diagonal entry");
    for (Index j = 0; j < d.cols(); ++j) {
      if (d(i, j) < 0.0) throw Error(ErrorKind::invariant, n + " has a negative distance");
      if (d(i, j) != d(j, i)) throw Error(ErrorKind::invariant, n + " is not symmetric");
      for (Index k = 0; k < d.rows(); ++k) {
        if (d(i, k) > d(i, j) + d(j, k) + 1e-12) {
          throw Error(ErrorKind::invariant, n + " violates the triangle inequality at (" + std::to_string(i) + "," +
                                                std::to_string(j) + "," + std::to_string(k) + ")");
        }
      }
    }
  }
}

double lipschitz_constant(const Vector& f, const Matrix& d) {
  if (f.size() != d.rows()) throw Error(ErrorKind::parameter, "function length must match the point count");
  double lip = 0.0;
  for (Index i = 0; i < f.size(); ++i) {
    for (Index j = i + 1; j < f.size(); ++j) {
      const double diff = std::abs(f(i) - f(j));
      if (d(i, j) > 0.0) lip = std::max(lip, diff / d(i, j));
      else if (diff > 0.0) return kInfinity;
    }
  }
  return lip;
}

Matrix distance_net(const Matrix& d) {
  validate_metric(d, "metric");
  std::vector<Vector> rows;
  for (Index x = 0; x < d.rows(); ++x) {
    const Vector f = d.col(x).array() - d(0, x);
    if (f.cwiseAbs().maxCoeff() == 0.0) continue;
    bool seen = false;
    for (const auto& r : rows) {
      seen = seen || (r - f).cwiseAbs().maxCoeff() <= kNetTolerance || (r + f).cwiseAbs().maxCoeff() <= kNetTolerance;
    }
    if (!seen) rows.push_back(f);
  }
  if (rows.empty()) rows.push_back(Vector::Zero(d.rows()));
  Matrix out(static_cast<Index>(rows.size()), d.rows());
  for (std::size_t r = 0; r < rows.size(); ++r) out.row(static_cast<Index>(r)) = rows[r].transpose();
  return out;
}

void LipschitzMapSpec::validate() const {
  validate_metric(dx, "domain metric");
  validate_metric(dy, "codomain metric");
  if (static_cast<Index>(map.size()) != dx.rows()) throw Error(ErrorKind::parameter, "map needs one image per point");
  for (int y : map) {
    if (y < 0 || y >= dy.rows()) throw Error(ErrorKind::index, "map image out of range");
  }
  if (map[0] != 0) throw Error(ErrorKind::invariant, "the map must send base point to base point");
  auto check_net = [](const Matrix& net, const Matrix& d, const char* name) {
    if (net.rows() < 1 || net.cols() != d.rows()) {
      throw Error(ErrorKind::parameter, std::string(name) + " functions must be given on every point");
    }
    check_finite(net, name);
    for (Index i = 0; i < net.rows(); ++i) {
      const Vector f = net.row(i).transpose();
      if (std::abs(f(0)) > kNetTolerance) {
        throw Error(ErrorKind::invariant, std::string(name) + " function " + std::to_string(i) +
                                              " does not vanish at the base point");
      }
      if (lipschitz_constant(f, d) > 1.0 + kNetTolerance) {
        throw Error(ErrorKind::invariant, std::string(name) + " function " + std::to_string(i) +
                                              " has Lipschitz constant above 1");
      }
    }
  };
  check_net(k_net, dx, "K net");
  check_net(w_net, dy, "W net");
}

std::vector<std::array<int, 2>> point_pairs(int n) {
  std::vector<std::array<int, 2>> out;
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      if (i != j) out.push_back({i, j});
    }
  }
  return out;
}

Instance build_lipschitz_instance(const LipschitzMapSpec& spec) {
  spec.validate();
  const auto pairs = point_pairs(static_cast<int>(spec.dx.rows()));
  if (pairs.empty()) throw Error(ErrorKind::parameter, "the domain needs at least two points");
  const Index n_a = static_cast<Index>(pairs.size());
  Vector q(n_a);
  Matrix h(n_a, spec.k_net.rows());
  Matrix m(n_a, spec.w_net.rows());
  for (Index a = 0; a < n_a; ++a) {
    const int x1 = pairs[static_cast<std::size_t>(a)][0];
    const int x2 = pairs[static_cast<std::size_t>(a)][1];
    const int y1 = spec.map[static_cast<std::size_t>(x1)];
    const int y2 = spec.map[static_cast<std::size_t>(x2)];
    h.row(a) = (spec.k_net.col(x1) - spec.k_net.col(x2)).transpose();
    m.row(a) = (spec.w_net.col(y1) - spec.w_net.col(y2)).transpose();
    q(a) = spec.dy(y1, y2);
  }
  const InstanceSizes sizes{static_cast<int>(n_a), 1, 1, static_cast<int>(h.cols()), static_cast<int>(m.cols())};
  return Instance(sizes, q, h, m);
}

namespace {

struct ClassicalLp {
  double constant = 0.0;
  Vector dual;  // per probe; the q-th powers of an extremal family's weights
};

/// C(mu) through  max theta  s.t.  sum_k nu_k |H_ak|^q - theta * Q_a^q >= 0,  sum nu = 1.
ClassicalLp classical_at(const Matrix& h, const Matrix& m, double q, double s, const Vector& mu) {
  const Index n = h.rows();
  Vector target(n);
  for (Index a = 0; a < n; ++a) {
    double acc = 0.0;
    for (Index w = 0; w < m.cols(); ++w) acc += mu(w) * std::pow(std::abs(m(a, w)), s);
    target(a) = std::pow(acc, q / s);
  }
  ClassicalLp out;
  out.dual = Vector::Zero(n);
  std::vector<Index> rows;
  for (Index a = 0; a < n; ++a) {
    if (target(a) > 0.0) rows.push_back(a);
  }
  if (rows.empty()) return out;

  const Index n_k = h.cols();
  const Index n_r = static_cast<Index>(rows.size());
  lp::Problem pb;
  pb.objective = Vector::Zero(n_k + 1);
  pb.objective(n_k) = -1.0;
  pb.constraints = Matrix::Zero(n_r + 1, n_k + 1);
  pb.rhs = Vector::Zero(n_r + 1);
  for (Index r = 0; r < n_r; ++r) {
    const Index a = rows[static_cast<std::size_t>(r)];
    for (Index k = 0; k < n_k; ++k) pb.constraints(r, k) = std::pow(std::abs(h(a, k)), q);
    pb.constraints(r, n_k) = -target(a);
    pb.senses.push_back(lp::RowSense::greater_equal);
  }
  pb.constraints.row(n_r).head(n_k).setOnes();
  pb.rhs(n_r) = 1.0;
  pb.senses.push_back(lp::RowSense::equal);

  const lp::Solution sol = lp::solve(pb);
  if (sol.status != lp::Status::optimal) {
    throw Error(ErrorKind::solver_failure, std::string("classical LP ended ") + lp::to_string(sol.status));
  }
  const double theta = sol.primal(n_k);
  if (!(theta > 0.0)) throw Error(ErrorKind::not_mixing, "no dominating measure exists on this net");
  out.constant = std::pow(theta, -1.0 / q);
  for (Index r = 0; r < n_r; ++r) out.dual(rows[static_cast<std::size_t>(r)]) = std::max(sol.dual(r), 0.0);
  return out;
}

ClassicalResult classical_search(const Matrix& h, const Matrix& m, double q, double s, int grid_depth) {
  const ExponentParams e = ExponentParams::mixing(q, s);
  const int n_w = static_cast<int>(m.cols());
  if (n_w > kMaxMixingPoints) throw Error(ErrorKind::parameter, "codomain net too large for the measure search");
  auto value = [&](const Vector& mu) { return classical_at(h, m, q, s, SimplexMeasure::normalized(mu).weights()).constant; };
  SimplexSearchOptions options;
  options.grid_depth = grid_depth;
  Vector mu = SimplexMeasure::normalized(maximize_on_simplex(n_w, value, options).point).weights();
  ClassicalLp at = classical_at(h, m, q, s, mu);

  // The LP dual at mu is an extremal family; its own optimal measure is a
  // point at least as bad for the map.
  for (int round = 0; round < 20 && at.constant > 0.0; ++round) {
    std::vector<Index> support;
    for (Index a = 0; a < at.dual.size(); ++a) {
      if (at.dual(a) > 0.0) support.push_back(a);
    }
    if (support.empty()) break;
    Vector sigma(static_cast<Index>(support.size()));
    Matrix values(static_cast<Index>(support.size()), m.cols());
    for (std::size_t j = 0; j < support.size(); ++j) {
      sigma(static_cast<Index>(j)) = std::pow(at.dual(support[j]), 1.0 / q);
      values.row(static_cast<Index>(j)) = m.row(support[j]);
    }
    Vector next;
    try {
      next = mixed_norm_sup_measure(MixedFamilyValues(sigma, values), e).mu_star.weights();
    } catch (const OptimizationError&) {
      break;
    }
    ClassicalLp trial = classical_at(h, m, q, s, next);
    if (!(trial.constant > at.constant * (1.0 + 1e-15))) break;
    mu = next;
    at = std::move(trial);
  }
  return {at.constant, SimplexMeasure::normalized(mu)};
}

}  // namespace

ClassicalResult linear_mixing_classical(const LinearOperatorSpec& spec, double q, double s, int grid_depth) {
  spec.validate();
  Matrix h(spec.probes.rows(), spec.k_net.rows());
  Matrix m(spec.probes.rows(), spec.w_net.rows());
  for (Index a = 0; a < spec.probes.rows(); ++a) {
    const Vector x = spec.probes.row(a).transpose();
    const Vector tx = spec.t * x;
    for (Index k = 0; k < h.cols(); ++k) h(a, k) = spec.k_net.row(k).dot(x);
    for (Index w = 0; w < m.cols(); ++w) m(a, w) = spec.w_net.row(w).dot(tx);
  }
  return classical_search(h, m, q, s, grid_depth);
}

ClassicalResult lipschitz_mixing_classical(const LipschitzMapSpec& spec, double q, double s, int grid_depth) {
  spec.validate();
  const int n = static_cast<int>(spec.dx.rows());
  std::vector<std::array<int, 2>> pairs;
  for (int x1 = 0; x1 < n; ++x1) {
    for (int x2 = 0; x2 < n; ++x2) {
      if (x1 != x2) pairs.push_back({x1, x2});
    }
  }
  Matrix h(static_cast<Index>(pairs.size()), spec.k_net.rows());
  Matrix m(static_cast<Index>(pairs.size()), spec.w_net.rows());
  for (std::size_t r = 0; r < pairs.size(); ++r) {
    const auto [x1, x2] = pairs[r];
    const int y1 = spec.map[static_cast<std::size_t>(x1)];
    const int y2 = spec.map[static_cast<std::size_t>(x2)];
    for (Index k = 0; k < h.cols(); ++k) h(static_cast<Index>(r), k) = spec.k_net(k, x1) - spec.k_net(k, x2);
    for (Index w = 0; w < m.cols(); ++w) m(static_cast<Index>(r), w) = spec.w_net(w, y1) - spec.w_net(w, y2);
  }
  return classical_search(h, m, q, s, grid_depth);
}

EmbeddingResult build_embedding_Jmu(const Instance& inst, const SimplexMeasure& mu, double s) {
  validate_positive(s, "s");
  if (s < 1.0) throw Error(ErrorKind::parameter, "the embedding needs s >= 1");
  const InstanceSizes& z = inst.sizes();
  if (mu.size() != z.w) throw Error(ErrorKind::parameter, "measure must live on the W discretization");

  TwoLayerSizes sizes{z.a, z.a + 1, z.c, z.c, z.g, z.k, z.w};
  const Index outer = static_cast<Index>(sizes.b) * sizes.c1 * sizes.g;
  const double level = inst.m().size() ? inst.m().cwiseAbs().maxCoeff() : 0.0;
  Matrix h1(outer, z.w);
  h1.topRows(inst.probe_count()) = inst.m();
  h1.bottomRows(outer - inst.probe_count()).setConstant(level);

  const Vector weights = mu.weights().array().pow(1.0 / s).matrix();
  Vector q1(outer);
  for (Index i = 0; i < outer; ++i) q1(i) = weighted_lp(weights, h1.row(i).transpose(), s);
  const Vector q2 = q1.head(inst.probe_count());

  std::vector<int> t_map(static_cast<std::size_t>(z.a));
  std::vector<int> c_map(static_cast<std::size_t>(z.c));
  for (int a = 0; a < z.a; ++a) t_map[static_cast<std::size_t>(a)] = a;
  for (int c = 0; c < z.c; ++c) c_map[static_cast<std::size_t>(c)] = c;

  EmbeddingResult out{TwoLayerInstance(sizes, std::move(t_map), std::move(c_map), q1, h1, h1, q2, inst.h(), inst.m(),
                                       inst.m()),
                      0.0, {}, 0.0};
  out.certificate = pietsch_domination(q1, h1, s);
  out.pi_check = out.certificate.delta;
  const Vector direct = mixing_probe_values(inst, mu.weights(), s);
  out.domination_gap = (direct - out.layer.q2()).maxCoeff();
  return out;
}

}  // namespace mixlab
