#include <random>

#include "doctest.h"
#include "mixlab/generators.hpp"
#include "mixlab/summing.hpp"
#include "oracles.hpp"

using namespace mixlab;

namespace {

Instance two_probe_identity() {
  Matrix h(2, 2);
  h << 1.0, 0.0, 0.0, 1.0;
  return Instance({2, 1, 1, 2, 1}, Vector::Ones(2), h, Matrix::Ones(2, 1));
}

}  // namespace

TEST_CASE("zero map has zero norm") {
  const Instance inst({2, 1, 1, 2, 1}, Vector::Zero(2), Matrix::Ones(2, 2), Matrix::Ones(2, 1));
  const DominationCertificate c = pietsch_norm_lp(inst, 1.0);
  CHECK(c.delta == 0.0);
  CHECK(c.nu.weights().sum() == doctest::Approx(1.0));
  SamplingOptions so;
  so.samples = 20;
  CHECK(ratio_lower_bound(inst, 1.0, so).value == 0.0);
}

TEST_CASE("single probe puts all mass on the largest H entry") {
  Matrix h(1, 2);
  h << 2.0, -1.0;
  const Instance inst({1, 1, 1, 2, 1}, Vector::Ones(1), h, Matrix::Ones(1, 1));
  const DominationCertificate c = pietsch_norm_lp(inst, 1.0);
  CHECK(c.delta == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(c.nu[0] == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(c.nu[1] == doctest::Approx(0.0));
}

TEST_CASE("two probes against identity H") {
  const Instance inst = two_probe_identity();
  const DominationCertificate c = pietsch_norm_lp(inst, 1.0);
  CHECK(c.delta == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(c.nu[0] == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(c.delta == doctest::Approx(oracle::domination_grid_2(inst.q(), inst.h(), 1.0, 1000)).epsilon(1e-9));

  SamplingOptions so;
  so.samples = 50;
  so.injected = {witness_from_dual(inst, c.probe_dual, 1.0)};
  const double lower = ratio_lower_bound(inst, 1.0, so).value;
  CHECK(lower >= 2.0 - 1e-6);
  CHECK(lower <= 2.0 + 1e-9);
}

TEST_CASE("domination constant matches a brute-force grid over nu") {
  Rng rng(21);
  for (int trial = 0; trial < 30; ++trial) {
    InstanceSizes z = random_sizes(rng, {3, 2, 2, 2, 1});
    z.k = 2;
    const Instance inst = random_instance(rng, z);
    const double p = 0.5 * (1 + trial % 4);
    const double lp_delta = pietsch_norm_lp(inst, p).delta;
    const double grid = oracle::domination_grid_2(inst.q(), inst.h(), p, 20000);
    // the grid can only overestimate the minimum
    CHECK(grid >= lp_delta * (1.0 - 1e-9));
    CHECK(grid == doctest::Approx(lp_delta).epsilon(1e-3));
  }
}

TEST_CASE("unreachable probe is not summable") {
  Matrix h(2, 1);
  h << 1.0, 0.0;
  const Instance inst({2, 1, 1, 1, 1}, Vector::Ones(2), h, Matrix::Ones(2, 1));
  try {
    pietsch_norm_lp(inst, 1.0);
    FAIL("expected not_summable");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::not_summable);
  }
}

TEST_CASE("single-element family ratio") {
  Rng rng(2);
  const Instance inst = random_instance(rng, {2, 2, 1, 3, 1});
  SamplingOptions so;
  so.samples = 0;
  so.injected = {WeightedFamily({FamilyEntry{0.7, 1, 0, 0}})};
  const int row = inst.probe(1, 0, 0);
  const double want = std::abs(inst.q()(row)) / inst.h().row(row).cwiseAbs().maxCoeff();
  CHECK(ratio_lower_bound(inst, 1.5, so).value == doctest::Approx(want).epsilon(1e-14));
}

TEST_CASE("witness_from_dual") {
  const Instance inst = two_probe_identity();
  Vector dual(2);
  dual << 1.0, 1.0;
  const WeightedFamily w = witness_from_dual(inst, dual, 1.0);
  REQUIRE(w.size() == 2);
  CHECK(w.entries()[0].sigma == 1.0);
  CHECK(strong_sum(inst, w, 1.0) / weak_sup(inst, w, 1.0, Side::k) == doctest::Approx(2.0));

  dual << 4.0, 0.0;
  const WeightedFamily single = witness_from_dual(inst, dual, 2.0);
  REQUIRE(single.size() == 1);
  CHECK(single.entries()[0].sigma == doctest::Approx(2.0).epsilon(1e-15));

  dual << 0.0, 0.0;
  try {
    witness_from_dual(inst, dual, 1.0);
    FAIL("expected empty_witness");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::empty_witness);
  }
}

TEST_CASE("sandwich, certificate validity, monotonicity and scaling") {
  Rng rng(8);
  const double ps[] = {0.5, 1.0, 2.0};
  for (int trial = 0; trial < 60; ++trial) {
    const Instance inst = random_instance(rng, random_sizes(rng, {4, 2, 2, 5, 1}));
    const double p = ps[trial % 3];
    const DominationCertificate c = pietsch_norm_lp(inst, p);
    CHECK(c.max_violation <= 1e-9);
    CHECK(domination_violation(inst.q(), inst.h(), p, c.delta, c.nu.weights()) <= 1e-9);

    SamplingOptions so;
    so.samples = 100;
    so.seed = static_cast<std::uint64_t>(trial);
    const double sampled = ratio_lower_bound(inst, p, so).value;
    CHECK(sampled <= c.delta + 1e-9);
    so.injected = {witness_from_dual(inst, c.probe_dual, p)};
    CHECK(ratio_lower_bound(inst, p, so).value == doctest::Approx(c.delta).epsilon(1e-6));

    const Matrix bigger = inst.h().cwiseAbs().array() + 0.25;
    CHECK(pietsch_norm_lp(Instance(inst.sizes(), inst.q(), bigger, inst.m()), p).delta <= c.delta * (1 + 1e-12));

    const double lambda = 3.25;
    CHECK(pietsch_norm_lp(Instance(inst.sizes(), lambda * inst.q(), inst.h(), inst.m()), p).delta ==
          doctest::Approx(lambda * c.delta).epsilon(1e-9));
    CHECK(pietsch_norm_lp(Instance(inst.sizes(), inst.q(), lambda * inst.h(), inst.m()), p).delta ==
          doctest::Approx(c.delta / lambda).epsilon(1e-9));
  }
}

TEST_CASE("sampling is reproducible") {
  Rng rng(4);
  const Instance inst = random_instance(rng, {3, 2, 1, 3, 1});
  SamplingOptions so;
  so.samples = 200;
  so.seed = 99;
  const RatioBound a = ratio_lower_bound(inst, 1.0, so);
  const RatioBound b = ratio_lower_bound(inst, 1.0, so);
  CHECK(a.value == b.value);
  CHECK(a.witness == b.witness);
}
