#include <algorithm>
#include <random>

#include "doctest.h"
#include "mixlab/core.hpp"
#include "mixlab/generators.hpp"
#include "mixlab/sampling.hpp"
#include "oracles.hpp"

using namespace mixlab;

namespace {

Instance scalar_instance(const std::vector<double>& q, const std::vector<std::vector<double>>& h) {
  const int n = static_cast<int>(q.size());
  const int k = static_cast<int>(h.front().size());
  Vector qv(n);
  Matrix hm(n, k);
  for (int i = 0; i < n; ++i) {
    qv(i) = q[i];
    for (int j = 0; j < k; ++j) hm(i, j) = h[i][j];
  }
  return Instance({n, 1, 1, k, k}, qv, hm, hm);
}

WeightedFamily family_on_a(const std::vector<double>& sigma) {
  std::vector<FamilyEntry> e;
  for (std::size_t j = 0; j < sigma.size(); ++j) e.push_back({sigma[j], static_cast<int>(j), 0, 0});
  return WeightedFamily(e);
}

}  // namespace

TEST_CASE("strong_sum hand values") {
  CHECK(strong_sum(scalar_instance({0.0}, {{1.0}}), family_on_a({1.0}), 1.0) == 0.0);
  CHECK(strong_sum(scalar_instance({3.0, -4.0}, {{1.0}, {1.0}}), family_on_a({1.0, 1.0}), 2.0) ==
        doctest::Approx(5.0).epsilon(1e-15));
  CHECK(strong_sum(scalar_instance({1.0, 1.0}, {{1.0}, {1.0}}), family_on_a({2.0, 1.0}), 1.0) ==
        doctest::Approx(3.0).epsilon(1e-15));
}

TEST_CASE("weak_sup hand values") {
  CHECK(weak_sup(scalar_instance({1.0}, {{0.0, 0.0}}), family_on_a({1.0}), 1.0, Side::k) == 0.0);
  // element 1 has |H| = (1, 0), element 2 has (0, 2): column sums 1 and 2
  const Instance inst = scalar_instance({1.0, 1.0}, {{1.0, 0.0}, {0.0, -2.0}});
  CHECK(weak_sup(inst, family_on_a({1.0, 1.0}), 1.0, Side::k) == doctest::Approx(2.0).epsilon(1e-15));
  CHECK(weak_sup(scalar_instance({1.0}, {{2.0, 1.0}}), family_on_a({1.0}), 2.0, Side::k) ==
        doctest::Approx(2.0).epsilon(1e-15));
}

TEST_CASE("errors: bad index and bad exponent") {
  const Instance inst = scalar_instance({1.0}, {{1.0}});
  const WeightedFamily out_of_range({FamilyEntry{1.0, 3, 0, 0}});
  try {
    strong_sum(inst, out_of_range, 1.0);
    FAIL("expected an index error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::index);
  }
  for (double p : {0.0, -1.0}) {
    try {
      weak_sup(inst, family_on_a({1.0}), p, Side::w);
      FAIL("expected a parameter error");
    } catch (const Error& e) {
      CHECK(e.kind() == ErrorKind::parameter);
    }
  }
  CHECK_THROWS_AS(WeightedFamily({FamilyEntry{0.0, 0, 0, 0}}), Error);
}

TEST_CASE("sums agree with a long-double oracle and obey their invariants") {
  Rng rng(3);
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  for (int trial = 0; trial < 50; ++trial) {
    const Instance inst = random_instance(rng, random_sizes(rng, {3, 2, 2, 4, 3}));
    FamilySampler sampler(static_cast<std::uint64_t>(trial), 8, 2.0);
    WeightedFamily fam = sampler.family(inst.sizes());
    const double p = 0.5 + trial % 4 * 0.5;

    std::vector<double> sigma;
    std::vector<double> qv;
    for (const auto& e : fam.entries()) {
      sigma.push_back(e.sigma);
      qv.push_back(inst.q()(inst.probe(e.a, e.c, e.g)));
    }
    CHECK(strong_sum(inst, fam, p) == doctest::Approx(oracle::power_sum(sigma, qv, p)).epsilon(1e-13));

    double weak = 0.0;
    for (int k = 0; k < inst.sizes().k; ++k) {
      std::vector<double> col;
      for (const auto& e : fam.entries()) col.push_back(inst.h()(inst.probe(e.a, e.c, e.g), k));
      weak = std::max(weak, oracle::power_sum(sigma, col, p));
    }
    CHECK(weak_sup(inst, fam, p, Side::k) == doctest::Approx(weak).epsilon(1e-13));

    // homogeneity
    const double lambda = std::exp(u(rng));
    std::vector<FamilyEntry> scaled = fam.entries();
    for (auto& e : scaled) e.sigma *= lambda;
    CHECK(strong_sum(inst, WeightedFamily(scaled), p) == doctest::Approx(lambda * strong_sum(inst, fam, p)).epsilon(1e-13));
    CHECK(weak_sup(inst, WeightedFamily(scaled), p, Side::w) ==
          doctest::Approx(lambda * weak_sup(inst, fam, p, Side::w)).epsilon(1e-13));

    // permutation
    std::vector<FamilyEntry> perm = fam.entries();
    std::reverse(perm.begin(), perm.end());
    CHECK(strong_sum(inst, WeightedFamily(perm), p) == doctest::Approx(strong_sum(inst, fam, p)).epsilon(1e-14));
    CHECK(weak_sup(inst, WeightedFamily(perm), p, Side::k) == doctest::Approx(weak_sup(inst, fam, p, Side::k)).epsilon(1e-14));

    // adding a K point never decreases weak_sup
    Matrix wider(inst.h().rows(), inst.h().cols() + 1);
    wider << inst.h(), Vector::NullaryExpr(inst.h().rows(), [&](Index) { return u(rng); });
    InstanceSizes z = inst.sizes();
    z.k += 1;
    const Instance more(z, inst.q(), wider, inst.m());
    CHECK(weak_sup(more, fam, p, Side::k) >= weak_sup(inst, fam, p, Side::k));

    // single element
    const FamilyEntry e0 = fam.entries().front();
    const WeightedFamily one({e0});
    const int row = inst.probe(e0.a, e0.c, e0.g);
    CHECK(strong_sum(inst, one, p) == doctest::Approx(std::abs(e0.sigma * inst.q()(row))).epsilon(1e-14));
    CHECK(weak_sup(inst, one, p, Side::k) ==
          doctest::Approx(std::abs(e0.sigma) * inst.h().row(row).cwiseAbs().maxCoeff()).epsilon(1e-14));
  }
}

TEST_CASE("lp_norm is safe at extreme magnitudes") {
  Vector big(2);
  big << 3e200, 4e200;
  CHECK(lp_norm(big, 2.0) == doctest::Approx(5e200).epsilon(1e-15));
  Vector tiny(2);
  tiny << 1e-200, 1e-200;
  CHECK(lp_norm(tiny, 0.5) == doctest::Approx(4e-200).epsilon(1e-14));
  CHECK(lp_norm(Vector::Zero(3), 1.0) == 0.0);
}

TEST_CASE("pairwise summation beats naive accumulation") {
  const int n = 100000;
  Vector x = Vector::Constant(n, 0.1);
  long double exact = 0.0L;
  for (int i = 0; i < n; ++i) exact += 0.1L;  // the long double sum of the rounded 0.1
  const long double reference = static_cast<long double>(0.1) * n;
  double naive = 0.0;
  for (int i = 0; i < n; ++i) naive += 0.1;
  const double pairwise = pairwise_sum(x);
  CHECK(std::abs(pairwise - static_cast<double>(reference)) <= std::abs(naive - static_cast<double>(reference)));
  CHECK(std::abs(pairwise - static_cast<double>(exact)) < 1e-10);
}

TEST_CASE("exponent parameters") {
  const ExponentParams e = ExponentParams::make(1.0, 1.0, 2.0);
  CHECK(e.r() == doctest::Approx(2.0));
  CHECK(ExponentParams::mixing(2.0, 2.0).r_infinite());
  CHECK_THROWS_AS(ExponentParams::make(1.0, 3.0, 2.0), Error);
  CHECK_THROWS_AS(ExponentParams::make(0.0, 1.0, 2.0), Error);
}

TEST_CASE("simplex measures") {
  CHECK(SimplexMeasure::uniform(4)[2] == 0.25);
  CHECK(SimplexMeasure::dirac(1, 3)[1] == 1.0);
  Vector bad(2);
  bad << 0.7, 0.7;
  CHECK_THROWS_AS(SimplexMeasure{bad}, Error);
  bad << -0.1, 1.1;
  CHECK_THROWS_AS(SimplexMeasure{bad}, Error);
  Vector raw(3);
  raw << 2.0, -1.0, 2.0;
  const SimplexMeasure n = SimplexMeasure::normalized(raw);
  CHECK(n[0] == 0.5);
  CHECK(n[1] == 0.0);
}

TEST_CASE("probe flattening is row-major") {
  const Instance inst({2, 3, 4, 1, 1}, Vector::Zero(24), Matrix::Zero(24, 1), Matrix::Zero(24, 1));
  CHECK(inst.probe(1, 2, 3) == (1 * 3 + 2) * 4 + 3);
  const auto idx = inst.unflatten(inst.probe(1, 0, 2));
  CHECK(idx[0] == 1);
  CHECK(idx[1] == 0);
  CHECK(idx[2] == 2);
  CHECK_THROWS_AS(Instance({1, 1, 1, 1, 1}, Vector::Zero(2), Matrix::Zero(1, 1), Matrix::Zero(1, 1)), Error);
}
