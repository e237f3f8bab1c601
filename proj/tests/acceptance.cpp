// Prints one PASS/FAIL line per acceptance criterion and exits nonzero if
// any fails. Tolerances are pinned here, not read from anywhere.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <random>
#include <string>

#include "mixlab/generators.hpp"
#include "mixlab/io.hpp"
#include "mixlab/verify.hpp"

using namespace mixlab;

namespace {

double rel(double a, double b) {
  const double scale = std::max(std::abs(a), std::abs(b));
  return scale == 0.0 ? 0.0 : std::abs(a - b) / scale;
}

Rng seeded(int criterion, int seed) {
  std::seed_seq seq{20240u, static_cast<unsigned>(criterion), static_cast<unsigned>(seed)};
  return Rng(seq);
}

int pick(Rng& rng, int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); }
double uniform(Rng& rng, double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng); }

double seconds_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

struct Outcome {
  bool passed = true;
  std::string detail;
};

std::string num(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3g", x);
  return buf;
}

/// Runs a criterion; a library error is a failure, never a crash.
bool run(const char* id, const char* title, const std::function<Outcome()>& body) {
  Outcome out;
  try {
    out = body();
  } catch (const Error& e) {
    out = {false, std::string("error ") + to_string(e.kind()) + ": " + e.what()};
  }
  std::printf("%s %s %s: %s\n", out.passed ? "PASS" : "FAIL", id, title, out.detail.c_str());
  std::fflush(stdout);
  return out.passed;
}

Outcome ac1() {
  const auto start = std::chrono::steady_clock::now();
  const double ps[] = {0.5, 1.0, 2.0};
  double duality = 0.0;
  double witness = 0.0;
  for (int seed = 0; seed < 100; ++seed) {
    Rng rng = seeded(1, seed);
    const Instance inst = random_instance(rng, random_sizes(rng, {4, 2, 2, 5, 1}));
    const double p = ps[seed % 3];
    const DominationCertificate cert = pietsch_norm_lp(inst, p);
    duality = std::max(duality, rel(cert.lp_value, cert.dual_value));
    if (cert.delta > 0.0) {
      const WeightedFamily fam = witness_from_dual(inst, cert.probe_dual, p);
      witness = std::max(witness, rel(strong_sum(inst, fam, p) / weak_sup(inst, fam, p, Side::k), cert.delta));
    }
  }
  const double elapsed = seconds_since(start);
  return {duality <= 1e-9 && witness <= 1e-6 && elapsed < 5.0,
          "max_duality_gap=" + num(duality) + " max_witness_gap=" + num(witness) + " seconds=" + num(elapsed)};
}

Outcome ac2() {
  double worst = 0.0;
  for (int seed = 0; seed < 100; ++seed) {
    Rng rng = seeded(2, seed);
    const MixedFamilyValues vals = random_mixed_values(rng, pick(rng, 1, 6), pick(rng, 1, 4));
    const double q = uniform(rng, 0.5, 3.0);
    const double closed = mixed_norm_closed_qq(vals, q);
    const double general = mixed_norm_sup_measure(vals, ExponentParams::make(q, q, q + 1e-9)).value;
    worst = std::max(worst, rel(closed, general));
  }
  return {worst <= 1e-4, "max_gap=" + num(worst)};
}

Outcome ac3() {
  double search = 0.0;
  double reconstructed = 0.0;
  for (int seed = 0; seed < 100; ++seed) {
    Rng rng = seeded(3, seed);
    const MixedFamilyValues vals = random_mixed_values(rng, pick(rng, 1, 6), pick(rng, 1, 4));
    const double q = uniform(rng, 0.5, 2.0);
    const ExponentParams e = ExponentParams::make(q, q, q * uniform(rng, 1.5, 3.0));
    const MixedNormResult sup = mixed_norm_sup_measure(vals, e);
    search = std::max(search, rel(sup.value, mixed_norm_tau_search(vals, e, 3, static_cast<std::uint64_t>(seed))));
    reconstructed = std::max(reconstructed, rel(tau_from_measure(vals, e, sup.mu_star, 1e-9).product, sup.value));
  }
  Vector sigma(2);
  sigma << 1.0, 1.0;
  const MixedFamilyValues example(sigma, Matrix::Identity(2, 2));
  const double value = mixed_norm(example, ExponentParams::make(1.0, 1.0, 2.0));
  const double example_err = std::abs(value - std::sqrt(2.0));
  return {search <= 1e-5 && reconstructed <= 1e-5 && example_err <= 1e-9,
          "max_tau_search_gap=" + num(search) + " max_tau_from_measure_gap=" + num(reconstructed) +
              " sqrt2_error=" + num(example_err)};
}

Outcome ac4() {
  const auto start = std::chrono::steady_clock::now();
  double gap = 0.0;
  double violation = 0.0;
  bool ordered = true;
  for (int seed = 0; seed < 50; ++seed) {
    Rng rng = seeded(4, seed);
    const Instance inst = random_instance(rng, random_sizes(rng, {3, 2, 2, 3, 2}));
    const ExponentParams e = ExponentParams::mixing(1.0, 2.0);
    const MixingUpperResult up = mixing_upper_domination(inst, e, 10);
    SamplingOptions so;
    so.samples = 200;
    so.seed = static_cast<std::uint64_t>(seed);
    if (!up.witness.empty()) so.injected = {up.witness};
    const double lower = mixing_lower_bound(inst, e, so).value;
    ordered = ordered && lower <= up.value * (1.0 + 1e-9) + 1e-12;
    if (up.value > 0.0) gap = std::max(gap, (up.value - lower) / up.value);
    violation = std::max(violation, up.certificate.max_violation);
  }
  const double elapsed = seconds_since(start);
  return {ordered && gap <= 0.05 && violation <= 1e-9 && elapsed < 60.0,
          "max_gap=" + num(gap) + " max_violation=" + num(violation) + " seconds=" + num(elapsed)};
}

Outcome ac5() {
  double worst = 0.0;
  bool holds = true;
  for (int seed = 0; seed < 20; ++seed) {
    Rng rng = seeded(5, seed);
    const LinearWitness lw = random_linear_witness(rng, random_sizes(rng, {3, 2, 2, 3, 1}), infinity_ball(2));
    const ExponentParams e = ExponentParams::mixing(1.0, 2.0);
    const MixingUpperResult up = mixing_upper_domination(lw.instance, e, 10);
    SeminormCheckOptions so;
    so.samples = 100;
    so.seed = static_cast<std::uint64_t>(seed);
    if (!up.witness.empty()) so.injected = {up.witness};
    const SeminormCheck c = check_seminorm_characterization(lw.instance, lw.ball, e, up.value, so);
    holds = holds && c.holds;
    worst = std::max(worst, rel(c.max_ratio, up.value));
  }
  return {holds && worst <= 1e-4, "max_gap=" + num(worst)};
}

void write_artifact(const std::string& name, int seed, Payload payload, const ExponentInput& e) {
  const std::string path = "counterexample_" + name + "_" + std::to_string(seed) + ".json";
  save_document(Document{std::move(payload), e, std::nullopt, name}, path);
  std::printf("  counterexample written to %s\n", path.c_str());
}

Outcome ac6() {
  auto two_layer = [](Rng& rng) {
    const TwoLayerSizes z{pick(rng, 1, 3), pick(rng, 1, 3), pick(rng, 1, 2), pick(rng, 1, 2),
                          pick(rng, 1, 2), pick(rng, 1, 3), pick(rng, 1, 2)};
    return random_two_layer(rng, z);
  };
  int failures[3] = {0, 0, 0};
  double ratio[3] = {0.0, 0.0, 0.0};
  auto track = [&](int which, const InequalityCheck& c) {
    if (c.rhs > 0.0) ratio[which] = std::max(ratio[which], c.lhs / c.rhs);
    return c.holds;
  };
  for (int seed = 0; seed < 100; ++seed) {
    Rng rng = seeded(61, seed);
    const TwoLayerInstance two = two_layer(rng);
    if (!track(0, check_composition_summing(two, ExponentParams::mixing(1.0, 2.0), 8, 1e-6))) {
      ++failures[0];
      write_artifact("composition_summing", seed, two, {1.0, 1.0, 2.0, {}});
    }
  }
  for (int seed = 0; seed < 100; ++seed) {
    Rng rng = seeded(62, seed);
    const Instance inst = random_instance(rng, random_sizes(rng, {3, 2, 2, 3, 2}));
    if (!track(1, check_inclusion(inst, ExponentParams::mixing(1.0, 3.0), ExponentParams::mixing(1.5, 2.0), 8,
                                  1e-5))) {
      ++failures[1];
      write_artifact("inclusion", seed, inst, {});
    }
  }
  for (int seed = 0; seed < 100; ++seed) {
    Rng rng = seeded(63, seed);
    const TwoLayerInstance two = two_layer(rng);
    if (!track(2, check_composition_mixing(two, 1.0, 2.0, 4.0, 8, 1e-5))) {
      ++failures[2];
      write_artifact("composition_mixing", seed, two, {1.0, 1.0, 2.0, 4.0});
    }
  }
  return {failures[0] + failures[1] + failures[2] == 0,
          "violations=" + std::to_string(failures[0]) + "/" + std::to_string(failures[1]) + "/" +
              std::to_string(failures[2]) + " max_lhs_over_rhs=" + num(ratio[0]) + "/" + num(ratio[1]) + "/" +
              num(ratio[2])};
}

Outcome ac7() {
  double reduction = 0.0;
  double boundary = 0.0;
  for (int seed = 0; seed < 20; ++seed) {
    Rng rng = seeded(7, seed);
    const Instance inst = random_instance(rng, random_sizes(rng, {3, 2, 2, 3, 3}));
    const MultilinearInstance mi = lift_instance(inst, 1.0, 2.0);
    const ExponentParams e = ExponentParams::mixing(1.0, 2.0);
    SamplingOptions so;
    so.samples = 200;
    so.seed = static_cast<std::uint64_t>(seed);
    MultiSamplingOptions mo;
    mo.samples = 200;
    mo.seed = so.seed;
    reduction = std::max(reduction, rel(multi_mixing_lower_bound(mi, mo).value, mixing_lower_bound(inst, e, so).value));
    const Instance back = reduce_t1(mi);
    reduction = std::max(reduction, rel(mixing_upper_domination(back, e, 8).value,
                                        mixing_upper_domination(inst, e, 8).value));
    const RatioBound lb = mixing_lower_bound(inst, e, so);
    reduction = std::max(reduction, rel(multi_mixing_ratio(mi, lift_family(lb.witness, inst)), lb.value));

    const LinearWitness lw = random_linear_witness(rng, random_sizes(rng, {3, 2, 2, 3, 1}), infinity_ball(2));
    const MultilinearInstance mq = lift_instance(lw.instance, 1.5, 1.5);
    MultiCheckOptions co;
    co.samples = 100;
    co.seed = so.seed;
    co.path = CasePath::closed_form;
    const double closed = multi_characterization_check(mq, lw.ball, kInfinity, co).max_ratio;
    co.path = CasePath::general;
    boundary = std::max(boundary, rel(closed, multi_characterization_check(mq, lw.ball, kInfinity, co).max_ratio));
  }
  return {reduction <= 1e-12 && boundary <= 1e-9,
          "max_reduction_gap=" + num(reduction) + " max_case_boundary_gap=" + num(boundary)};
}

Outcome ac8() {
  double worst = 0.0;
  int checked = 0;
  auto check = [&](const Instance& inst, Rng& rng) {
    if (inst.m().cwiseAbs().maxCoeff() == 0.0) return;
    Vector raw(inst.sizes().w);
    for (Index w = 0; w < raw.size(); ++w) raw(w) = uniform(rng, 0.0, 1.0);
    for (const SimplexMeasure& mu : {SimplexMeasure::uniform(inst.sizes().w), SimplexMeasure::normalized(raw)}) {
      for (double s : {1.0, 2.0, 3.5}) {
        worst = std::max(worst, std::abs(build_embedding_Jmu(inst, mu, s).pi_check - 1.0));
        ++checked;
      }
    }
  };
  for (int seed = 0; seed < 20; ++seed) {
    Rng rng = seeded(8, seed);
    check(build_linear_instance(random_linear_spec(rng, pick(rng, 1, 3), pick(rng, 1, 3))), rng);
    check(build_lipschitz_instance(random_lipschitz_spec(rng, pick(rng, 2, 4), pick(rng, 2, 3))), rng);
  }
  return {worst <= 1e-9 && checked > 0, "cases=" + std::to_string(checked) + " max_error=" + num(worst)};
}

Outcome ac9() {
  double linear = 0.0;
  double lipschitz = 0.0;
  for (int seed = 0; seed < 20; ++seed) {
    Rng rng = seeded(9, seed);
    const LinearOperatorSpec ls = random_linear_spec(rng, 2, 2);
    linear = std::max(linear, rel(mixing_upper_domination(build_linear_instance(ls), ExponentParams::mixing(1.0, 2.0), 10).value,
                                  linear_mixing_classical(ls, 1.0, 2.0, 10).value));
    const LipschitzMapSpec ms = random_lipschitz_spec(rng, 4, 3);
    lipschitz = std::max(lipschitz,
                         rel(mixing_upper_domination(build_lipschitz_instance(ms), ExponentParams::mixing(1.0, 2.0), 10).value,
                             lipschitz_mixing_classical(ms, 1.0, 2.0, 10).value));
  }
  return {linear <= 1e-6 && lipschitz <= 1e-6, "max_linear_gap=" + num(linear) + " max_lipschitz_gap=" + num(lipschitz)};
}

Outcome ac10() {
  std::vector<std::filesystem::path> files;
  for (const auto& entry : std::filesystem::directory_iterator(MIXLAB_DATA_DIR)) {
    if (entry.path().extension() == ".json") files.push_back(entry.path());
  }
  std::sort(files.begin(), files.end());
  std::vector<std::pair<std::string, Document>> docs;
  for (const auto& f : files) docs.emplace_back(f.filename().string(), load_document(f.string()));
  VerifyOptions o;
  o.seed = 42;
  const std::string first = verify_suite(docs, o).text();
  const std::string second = verify_suite(docs, o).text();
  return {first == second, "bytes=" + std::to_string(first.size()) + (first == second ? " identical" : " differ")};
}

}  // namespace

int main() {
  bool ok = true;
  ok &= run("AC1", "summing norm LP duality and witness", ac1);
  ok &= run("AC2", "closed form at q = s", ac2);
  ok &= run("AC3", "measure and tau forms of the mixed norm", ac3);
  ok &= run("AC4", "mixing constant sandwich", ac4);
  ok &= run("AC5", "seminorm ball coherence", ac5);
  ok &= run("AC6", "composition and inclusion inequalities", ac6);
  ok &= run("AC7", "one-factor reduction and case boundary", ac7);
  ok &= run("AC8", "embedding norm equals one", ac8);
  ok &= run("AC9", "classical coherence for operators and Lipschitz maps", ac9);
  ok &= run("AC10", "verify-suite determinism", ac10);
  return ok ? 0 : 1;
}
