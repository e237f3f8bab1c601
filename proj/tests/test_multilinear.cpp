#include <random>

#include "doctest.h"
#include "mixlab/generators.hpp"
#include "mixlab/multilinear.hpp"
#include "mixlab/sampling.hpp"
#include "oracles.hpp"

using namespace mixlab;

namespace {

MultiSamplingOptions multi_opts(std::uint64_t seed, int samples = 150) {
  MultiSamplingOptions o;
  o.seed = seed;
  o.samples = samples;
  return o;
}

SamplingOptions single_opts(std::uint64_t seed, int samples = 150) {
  SamplingOptions o;
  o.seed = seed;
  o.samples = samples;
  return o;
}

}  // namespace

TEST_CASE("zero M gives zero") {
  Rng rng(1);
  MultilinearInstance mi = random_multilinear(rng, {{2}, {1}, {1, 2}, {2, 2}, 2}, Vector::Ones(2), 1.0, 2.0);
  const MultilinearInstance zero(mi.sizes(), mi.h(), Matrix::Zero(mi.m().rows(), mi.m().cols()), mi.p(), 1.0, 2.0);
  CHECK(multi_mixing_lower_bound(zero, multi_opts(3)).value == 0.0);
}

TEST_CASE("one factor reduces exactly to the single-factor computations") {
  for (int seed = 0; seed < 20; ++seed) {
    Rng rng(100 + static_cast<std::uint64_t>(seed));
    const Instance inst = random_instance(rng, random_sizes(rng, {3, 2, 2, 3, 3}));
    const double s = seed % 2 ? 2.0 : 1.0;
    const MultilinearInstance mi = lift_instance(inst, 1.0, s);
    const Instance back = reduce_t1(mi);
    CHECK(back.h() == inst.h());
    CHECK(back.m() == inst.m());

    const ExponentParams e = ExponentParams::mixing(1.0, s);
    const MultiRatioBound multi = multi_mixing_lower_bound(mi, multi_opts(static_cast<std::uint64_t>(seed)));
    const RatioBound single = mixing_lower_bound(back, e, single_opts(static_cast<std::uint64_t>(seed)));
    CHECK(multi.value == single.value);
    CHECK(lower_family(multi.witness, back) == single.witness);

    const MultiFamily lifted = lift_family(single.witness, back);
    CHECK(multi_weak_product(mi, lifted) == weak_sup(back, single.witness, 1.0, Side::k));
    const MixedFamilyValues a = multi_values(mi, lifted);
    const MixedFamilyValues b = MixedFamilyValues::from(back, single.witness);
    CHECK(a.values == b.values);
    CHECK(a.sigma == b.sigma);
  }
}

TEST_CASE("constant second kernel contributes the plain q-sum of the weights") {
  Rng rng(7);
  const MultilinearSizes z{{2}, {1}, {2, 1}, {3, 2}, 2};
  Vector p(2);
  p << 1.5, 1.0;
  MultilinearInstance base = random_multilinear(rng, z, p, 2.0, 3.0);
  std::vector<Matrix> h = base.h();
  h[1].setOnes();
  const MultilinearInstance mi(z, h, base.m(), p, 2.0, 3.0);

  FamilySampler sampler(5, 6, 2.0);
  for (int n = 0; n < 20; ++n) {
    const WeightedFamily flat = sampler.family({2, 1, 2, 1, 1});
    MultiFamily fam;
    std::vector<double> sigma;
    for (const auto& e : flat.entries()) {
      fam.push_back(MultiEntry{e.sigma, e.a, 0, {e.g, 0}});
      sigma.push_back(e.sigma);
    }
    double first = 0.0;
    for (int k = 0; k < 3; ++k) {
      std::vector<double> col;
      for (const auto& e : fam) col.push_back(h[0](mi.h_row(0, e.a, e.c, e.g[0]), k));
      first = std::max(first, oracle::power_sum(sigma, col, 1.5));
    }
    const double second = oracle::power_sum(sigma, std::vector<double>(sigma.size(), 1.0), 1.0);
    CHECK(multi_weak_product(mi, fam) == doctest::Approx(first * second).epsilon(1e-13));
  }
}

TEST_CASE("characterization check: reduction, sandwich and case split") {
  const SeminormBallModel ball = infinity_ball(2);
  for (int seed = 0; seed < 10; ++seed) {
    Rng rng(200 + static_cast<std::uint64_t>(seed));
    const LinearWitness lw = random_linear_witness(rng, random_sizes(rng, {3, 2, 2, 3, 1}), ball);
    const ExponentParams e = ExponentParams::mixing(1.0, 2.0);
    const MultilinearInstance mi = lift_instance(lw.instance, 1.0, 2.0);

    SeminormCheckOptions so;
    so.samples = 40;
    so.seed = static_cast<std::uint64_t>(seed);
    MultiCheckOptions mo;
    mo.samples = 40;
    mo.seed = static_cast<std::uint64_t>(seed);
    const double single = check_seminorm_characterization(lw.instance, lw.ball, e, kInfinity, so).max_ratio;
    const double multi = multi_characterization_check(mi, lw.ball, kInfinity, mo).max_ratio;
    CHECK(multi == doctest::Approx(single).epsilon(1e-12));

    const MultilinearInstance boundary = lift_instance(lw.instance, 1.5, 1.5);
    mo.path = CasePath::closed_form;
    const double closed = multi_characterization_check(boundary, lw.ball, kInfinity, mo).max_ratio;
    mo.path = CasePath::general;
    const double general = multi_characterization_check(boundary, lw.ball, kInfinity, mo).max_ratio;
    CHECK(closed == doctest::Approx(general).epsilon(1e-9));
  }

  // two kernels: no tuple beats the family's own mixing ratio
  for (int seed = 0; seed < 50; ++seed) {
    Rng rng(300 + static_cast<std::uint64_t>(seed));
    const MultilinearSizes z{{2}, {1}, {1, 2}, {2, 2}, 4};
    MultilinearInstance shape = random_multilinear(rng, z, Vector::Ones(2), 1.0, 2.0);
    SeminormBallModel model = ball;
    model.m_coeff = Matrix::NullaryExpr(shape.m().rows(), 2, [&](Index, Index) {
      return std::uniform_real_distribution<double>(-1.0, 1.0)(rng);
    });
    const MultilinearInstance mi(z, shape.h(), model.m_coeff * model.vertices.transpose(), Vector::Ones(2), 1.0, 2.0);
    const MultiRatioBound lb = multi_mixing_lower_bound(mi, multi_opts(static_cast<std::uint64_t>(seed), 40));
    MultiCheckOptions mo;
    mo.samples = 0;
    mo.injected = {lb.witness};
    mo.random_tuples = 8;
    const MultiCheck c = multi_characterization_check(mi, model, lb.value, mo);
    CHECK(c.max_ratio <= lb.value + 1e-6);
    CHECK(c.max_ratio == doctest::Approx(lb.value).epsilon(1e-6));
  }
}

TEST_CASE("larger kernels never raise the lower bound") {
  Rng rng(11);
  const MultilinearSizes z{{2}, {2}, {2, 1}, {2, 3}, 3};
  Vector p(2);
  p << 1.0, 1.0;
  const MultilinearInstance mi = random_multilinear(rng, z, p, 1.0, 2.0);
  for (int k = 0; k < 2; ++k) {
    std::vector<Matrix> h = mi.h();
    h[static_cast<std::size_t>(k)] = h[static_cast<std::size_t>(k)].cwiseAbs().array() * 1.5 + 0.1;
    const MultilinearInstance bigger(z, h, mi.m(), p, 1.0, 2.0);
    CHECK(multi_mixing_lower_bound(bigger, multi_opts(9)).value <= multi_mixing_lower_bound(mi, multi_opts(9)).value);
  }
}

TEST_CASE("reduction preconditions and the identity instance") {
  Rng rng(13);
  const MultilinearInstance two = random_multilinear(rng, {{2}, {1}, {1, 1}, {2, 2}, 2}, Vector::Ones(2), 1.0, 2.0);
  CHECK_THROWS_AS(reduce_t1(two), Error);
  CHECK_THROWS_AS(MultilinearInstance(two.sizes(), {two.h()[0]}, two.m(), Vector::Ones(2), 1.0, 2.0), Error);

  const Instance ident = identity_instance(rng, {3, 1, 1, 3, 3});
  const MultilinearInstance lifted = lift_instance(ident, 1.0, 1.0);
  CHECK(multi_mixing_lower_bound(lifted, multi_opts(1)).value == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(mixing_lower_bound(reduce_t1(lifted), ExponentParams::mixing(1.0, 1.0), single_opts(1)).value ==
        doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("joint index flattening") {
  const MultilinearSizes z{{2, 3}, {1}, {2, 2}, {1, 1}, 1};
  CHECK(z.joint_a() == 6);
  CHECK(z.joint_g() == 4);
  const MultilinearInstance mi(z, {Matrix::Zero(12, 1), Matrix::Zero(12, 1)}, Matrix::Zero(24, 1), Vector::Ones(2), 1.0,
                               2.0);
  CHECK(mi.m_row(5, 0, {1, 0}) == (5 * 1 + 0) * 4 + 2);
  CHECK(mi.h_row(1, 4, 0, 1) == (4 * 1 + 0) * 2 + 1);
}
