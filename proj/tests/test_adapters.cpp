#include <random>

#include "doctest.h"
#include "mixlab/adapters.hpp"
#include "mixlab/generators.hpp"

using namespace mixlab;

namespace {

LinearOperatorSpec linear(const Matrix& t) {
  LinearOperatorSpec spec;
  spec.t = t;
  spec.k_net = coordinate_net(static_cast<int>(t.cols()));
  spec.w_net = coordinate_net(static_cast<int>(t.rows()));
  spec.probes = default_probes(static_cast<int>(t.cols()));
  return spec;
}

Matrix line_metric(const std::vector<double>& x) {
  const Index n = static_cast<Index>(x.size());
  Matrix d(n, n);
  for (Index i = 0; i < n; ++i) {
    for (Index j = 0; j < n; ++j) d(i, j) = std::abs(x[static_cast<std::size_t>(i)] - x[static_cast<std::size_t>(j)]);
  }
  return d;
}

LipschitzMapSpec lipschitz(const Matrix& dx, const Matrix& dy, std::vector<int> map) {
  LipschitzMapSpec spec;
  spec.dx = dx;
  spec.dy = dy;
  spec.map = std::move(map);
  spec.k_net = distance_net(dx);
  spec.w_net = distance_net(dy);
  return spec;
}

}  // namespace

TEST_CASE("identity operator") {
  const Instance inst = build_linear_instance(linear(Matrix::Identity(2, 2)));
  CHECK(inst.h() == inst.m());
  CHECK(mixing_upper_domination(inst, ExponentParams::mixing(1.0, 1.0), 8).value == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(linear_mixing_classical(linear(Matrix::Identity(2, 2)), 1.0, 1.0, 8).value == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("zero operator") {
  const LinearOperatorSpec spec = linear(Matrix::Zero(2, 2));
  const Instance inst = build_linear_instance(spec);
  CHECK(pietsch_norm_lp(inst, 1.0).delta == 0.0);
  CHECK(mixing_upper_domination(inst, ExponentParams::mixing(1.0, 2.0), 8).value == 0.0);
  CHECK(linear_mixing_classical(spec, 1.0, 2.0, 8).value == 0.0);
  CHECK(build_embedding_Jmu(inst, SimplexMeasure::uniform(inst.sizes().w), 2.0).pi_check == 0.0);
}

TEST_CASE("diagonal operator: abstract and classical paths agree") {
  Matrix t(2, 2);
  t << 1.0, 0.0, 0.0, 0.0;
  const LinearOperatorSpec spec = linear(t);
  const double abstract = mixing_upper_domination(build_linear_instance(spec), ExponentParams::mixing(1.0, 2.0), 10).value;
  const double classical = linear_mixing_classical(spec, 1.0, 2.0, 10).value;
  CHECK(abstract == doctest::Approx(classical).epsilon(1e-6));
  CHECK(abstract > 0.0);
}

TEST_CASE("random operators on shared nets") {
  for (int seed = 0; seed < 10; ++seed) {
    Rng rng(500 + static_cast<std::uint64_t>(seed));
    const LinearOperatorSpec spec = random_linear_spec(rng, 2, 2);
    const double abstract = mixing_upper_domination(build_linear_instance(spec), ExponentParams::mixing(1.0, 2.0), 10).value;
    CHECK(abstract == doctest::Approx(linear_mixing_classical(spec, 1.0, 2.0, 10).value).epsilon(1e-6));
  }
}

TEST_CASE("Lipschitz maps: isometry, constant map and a contraction") {
  const Matrix two = line_metric({0.0, 1.0});
  const LipschitzMapSpec iso = lipschitz(two, two, {0, 1});
  CHECK(mixing_upper_domination(build_lipschitz_instance(iso), ExponentParams::mixing(1.0, 1.0), 8).value ==
        doctest::Approx(1.0).epsilon(1e-12));

  const LipschitzMapSpec constant = lipschitz(line_metric({0.0, 1.0, 2.0}), two, {0, 0, 0});
  const Instance flat = build_lipschitz_instance(constant);
  CHECK(flat.m().cwiseAbs().maxCoeff() == 0.0);
  CHECK(flat.q().cwiseAbs().maxCoeff() == 0.0);
  CHECK(mixing_upper_domination(flat, ExponentParams::mixing(1.0, 2.0), 8).value == 0.0);

  const LipschitzMapSpec path = lipschitz(line_metric({0.0, 1.0, 2.0}), line_metric({0.0, 0.5, 1.0}), {0, 1, 2});
  const double abstract = mixing_upper_domination(build_lipschitz_instance(path), ExponentParams::mixing(1.0, 2.0), 10).value;
  CHECK(abstract == doctest::Approx(lipschitz_mixing_classical(path, 1.0, 2.0, 10).value).epsilon(1e-6));
}

TEST_CASE("distance nets are 1-Lipschitz and vanish at the base point") {
  for (int seed = 0; seed < 20; ++seed) {
    Rng rng(600 + static_cast<std::uint64_t>(seed));
    const LipschitzMapSpec spec = random_lipschitz_spec(rng, 5, 3);
    for (const Matrix* net : {&spec.k_net, &spec.w_net}) {
      const Matrix& d = net == &spec.k_net ? spec.dx : spec.dy;
      for (Index r = 0; r < net->rows(); ++r) {
        CHECK(lipschitz_constant(net->row(r).transpose(), d) <= 1.0 + 1e-12);
        CHECK((*net)(r, 0) == 0.0);
      }
    }
  }
}

TEST_CASE("metric and spec validation") {
  Matrix bad = line_metric({0.0, 1.0, 2.0});
  bad(0, 2) = bad(2, 0) = 5.0;
  try {
    validate_metric(bad, "dX");
    FAIL("expected an invariant error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::invariant);
  }
  LinearOperatorSpec spec = linear(Matrix::Identity(2, 2));
  spec.probes = Matrix::Ones(2, 3);
  CHECK_THROWS_AS(spec.validate(), Error);
  CHECK_THROWS_AS(build_linear_instance(spec), Error);
}

TEST_CASE("embedding into L_s(mu)") {
  for (int seed = 0; seed < 10; ++seed) {
    Rng rng(700 + static_cast<std::uint64_t>(seed));
    const Instance inst = build_linear_instance(random_linear_spec(rng, 2, 2));
    const EmbeddingResult j = build_embedding_Jmu(inst, SimplexMeasure::uniform(inst.sizes().w), 2.0);
    CHECK(std::abs(j.pi_check - 1.0) <= 1e-9);
    CHECK(j.domination_gap <= 1e-12);
  }

  Rng rng(9);
  const Instance inst = random_instance(rng, {2, 1, 1, 2, 3});
  const int w0 = 1;
  const EmbeddingResult dirac = build_embedding_Jmu(inst, SimplexMeasure::dirac(w0, 3), 1.5);
  const TwoLayerInstance& layer = dirac.layer;
  for (Index i = 0; i < layer.q1().size(); ++i) {
    CHECK(layer.q1()(i) == doctest::Approx(std::abs(layer.h1()(i, w0))).epsilon(1e-15));
  }
  CHECK(dirac.pi_check == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(domination_violation(layer.q1(), layer.h1(), 1.5, 1.0, SimplexMeasure::dirac(w0, 3).weights()) <= 1e-12);

  CHECK_THROWS_AS(build_embedding_Jmu(inst, SimplexMeasure::uniform(2), 2.0), Error);
}
