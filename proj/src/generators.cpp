#include "mixlab/generators.hpp"

namespace mixlab {

namespace {

double unit(Rng& rng) { return std::uniform_real_distribution<double>(-1.0, 1.0)(rng); }

int upto(Rng& rng, int n) { return std::uniform_int_distribution<int>(1, n)(rng); }

Matrix random_matrix(Rng& rng, Index rows, Index cols) {
  Matrix out(rows, cols);
  for (Index i = 0; i < rows; ++i) {
    for (Index j = 0; j < cols; ++j) out(i, j) = unit(rng);
  }
  return out;
}

}  // namespace

InstanceSizes random_sizes(Rng& rng, const InstanceSizes& max) {
  InstanceSizes z;
  z.a = upto(rng, max.a);
  z.c = upto(rng, max.c);
  z.g = upto(rng, max.g);
  z.k = upto(rng, max.k);
  z.w = upto(rng, max.w);
  return z;
}

Instance random_instance(Rng& rng, const InstanceSizes& sizes) {
  const Index n = sizes.probes();
  const Matrix q = random_matrix(rng, n, 1);
  const Matrix h = random_matrix(rng, n, sizes.k);
  const Matrix m = random_matrix(rng, n, sizes.w);
  return Instance(sizes, q.col(0), h, m);
}

Instance identity_instance(Rng& rng, const InstanceSizes& sizes) {
  InstanceSizes z = sizes;
  z.w = z.k;
  const Matrix h = random_matrix(rng, z.probes(), z.k);
  Vector q(z.probes());
  for (Index i = 0; i < q.size(); ++i) q(i) = h.row(i).cwiseAbs().maxCoeff();
  return Instance(z, q, h, h);
}

MixedFamilyValues random_mixed_values(Rng& rng, int m, int n_w) {
  Vector sigma(m);
  for (int j = 0; j < m; ++j) {
    const double mag = std::exp(2.0 * unit(rng));
    sigma(j) = unit(rng) < 0.0 ? -mag : mag;
  }
  return MixedFamilyValues(sigma, random_matrix(rng, m, n_w));
}

TwoLayerInstance random_two_layer(Rng& rng, const TwoLayerSizes& z) {
  std::vector<int> t_map(static_cast<std::size_t>(z.a));
  std::vector<int> c_map(static_cast<std::size_t>(z.c));
  for (auto& v : t_map) v = upto(rng, z.b) - 1;
  for (auto& v : c_map) v = upto(rng, z.c1) - 1;
  const Index outer = static_cast<Index>(z.b) * z.c1 * z.g;
  const Index inner = static_cast<Index>(z.a) * z.c * z.g;
  const Vector q1 = random_matrix(rng, outer, 1).col(0);
  const Matrix h1 = random_matrix(rng, outer, z.w);
  const Matrix m1 = random_matrix(rng, outer, z.w);
  const Matrix h = random_matrix(rng, inner, z.k);
  Vector q2 = random_matrix(rng, inner, 1).col(0);
  Matrix m = random_matrix(rng, inner, z.w);
  Matrix m2 = random_matrix(rng, inner, z.w);
  for (int a = 0; a < z.a; ++a) {
    for (int c = 0; c < z.c; ++c) {
      for (int g = 0; g < z.g; ++g) {
        const Index i = (static_cast<Index>(a) * z.c + c) * z.g + g;
        const Index o = (static_cast<Index>(t_map[static_cast<std::size_t>(a)]) * z.c1 +
                         c_map[static_cast<std::size_t>(c)]) * z.g + g;
        q2(i) = std::copysign(std::min(std::abs(q2(i)), std::abs(q1(o))), q2(i));
        for (int w = 0; w < z.w; ++w) {
          m2(i, w) = std::copysign(std::min(std::abs(m2(i, w)), std::abs(m1(o, w))), m2(i, w));
          m(i, w) = std::copysign(std::max(std::abs(m(i, w)), std::abs(h1(o, w))), m(i, w));
        }
      }
    }
  }
  return TwoLayerInstance(z, std::move(t_map), std::move(c_map), q1, h1, m1, q2, h, m, m2);
}

SeminormBallModel infinity_ball(int d) {
  if (d < 1 || d > 16) throw Error(ErrorKind::parameter, "ball dimension must be in 1..16");
  SeminormBallModel ball;
  ball.d = d;
  ball.functionals = Matrix::Identity(d, d);
  const int n = 1 << d;
  ball.vertices.resize(n, d);
  for (int v = 0; v < n; ++v) {
    for (int i = 0; i < d; ++i) ball.vertices(v, i) = (v >> (d - 1 - i)) & 1 ? -1.0 : 1.0;
  }
  ball.m_coeff.resize(0, d);
  return ball;
}

LinearWitness random_linear_witness(Rng& rng, const InstanceSizes& sizes, const SeminormBallModel& ball) {
  InstanceSizes z = sizes;
  z.w = static_cast<int>(ball.vertices.rows());
  SeminormBallModel model = ball;
  model.m_coeff = random_matrix(rng, z.probes(), ball.d);
  const Matrix h = random_matrix(rng, z.probes(), z.k);
  const Matrix m = model.m_coeff * ball.vertices.transpose();
  return {Instance(z, Vector::Zero(z.probes()), h, m), model};
}

LinearOperatorSpec random_linear_spec(Rng& rng, int n_e, int n_f) {
  LinearOperatorSpec spec;
  spec.t = random_matrix(rng, n_f, n_e);
  spec.k_net = coordinate_net(n_e);
  spec.w_net = coordinate_net(n_f);
  spec.probes = default_probes(n_e);
  return spec;
}

LipschitzMapSpec random_lipschitz_spec(Rng& rng, int n_x, int n_y) {
  auto points = [&](int n) {
    Matrix p = random_matrix(rng, n, 2);
    p.row(0).setZero();
    Matrix d(n, n);
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j) d(i, j) = (p.row(i) - p.row(j)).norm();
    }
    // Exact symmetry; the square root can differ in the last bit.
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < i; ++j) d(i, j) = d(j, i);
    }
    return d;
  };
  LipschitzMapSpec spec;
  spec.dx = points(n_x);
  spec.dy = points(n_y);
  spec.map.resize(static_cast<std::size_t>(n_x));
  spec.map[0] = 0;
  for (int x = 1; x < n_x; ++x) spec.map[static_cast<std::size_t>(x)] = upto(rng, n_y) - 1;
  spec.k_net = distance_net(spec.dx);
  spec.w_net = distance_net(spec.dy);
  return spec;
}

MultilinearInstance random_multilinear(Rng& rng, const MultilinearSizes& sizes, const Vector& p, double q, double s) {
  const Index ac = static_cast<Index>(sizes.joint_a()) * sizes.joint_c();
  std::vector<Matrix> h;
  for (std::size_t k = 0; k < sizes.k.size(); ++k) h.push_back(random_matrix(rng, ac * sizes.g[k], sizes.k[k]));
  Matrix m = random_matrix(rng, ac * sizes.joint_g(), sizes.w);
  return MultilinearInstance(sizes, std::move(h), std::move(m), p, q, s);
}

MultilinearInstance lift_instance(const Instance& inst, double q, double s) {
  const auto& z = inst.sizes();
  MultilinearSizes sizes{{z.a}, {z.c}, {z.g}, {z.k}, z.w};
  return MultilinearInstance(sizes, {inst.h()}, inst.m(), Vector::Constant(1, q), q, s);
}

}  // namespace mixlab
