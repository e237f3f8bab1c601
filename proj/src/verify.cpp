#include "mixlab/verify.hpp"

#include <algorithm>
#include <cstdio>
#include <random>
#include <sstream>

#include "mixlab/generators.hpp"

namespace mixlab {

std::string format_real(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

void VerifyReport::append(const VerifyReport& other) {
  properties_.insert(properties_.end(), other.properties_.begin(), other.properties_.end());
}

bool VerifyReport::passed() const { return first_failure() == nullptr; }

const Property* VerifyReport::first_failure() const {
  for (const auto& p : properties_) {
    if (!p.passed) return &p;
  }
  return nullptr;
}

std::string VerifyReport::text() const {
  std::ostringstream out;
  for (const auto& p : properties_) {
    out << (p.passed ? "PASS " : "FAIL ") << p.name;
    if (!p.detail.empty()) out << ": " << p.detail;
    out << '\n';
    if (!p.artifact.empty()) out << "counterexample:\n" << p.artifact;
  }
  int failed = 0;
  for (const auto& p : properties_) failed += p.passed ? 0 : 1;
  out << properties_.size() - static_cast<std::size_t>(failed) << " passed, " << failed << " failed\n";
  return out.str();
}

namespace {

double rel_diff(double a, double b) {
  const double scale = std::max(std::abs(a), std::abs(b));
  if (scale == 0.0) return 0.0;
  return std::abs(a - b) / scale;
}

class Detail {
 public:
  Detail& add(const std::string& key, double value) {
    if (!text_.empty()) text_ += ' ';
    text_ += key + '=' + format_real(value);
    return *this;
  }
  Detail& note(const std::string& text) {
    if (!text_.empty()) text_ += ' ';
    text_ += text;
    return *this;
  }
  std::string str() const { return text_; }

 private:
  std::string text_;
};

struct Exponents {
  double p;
  double q;
  double s;
  double t;
};

Exponents resolve(const ExponentInput& in) {
  Exponents e{};
  e.q = in.q.value_or(1.0);
  e.s = in.s.value_or(std::max(2.0, e.q));
  e.p = in.p.value_or(e.q);
  e.t = in.t.value_or(2.0 * e.s);
  return e;
}

/// Runs `body`, turning a library error into a failed property.
template <typename F>
Property guarded(const std::string& name, F&& body) {
  Property prop{name, true, {}, {}};
  try {
    body(prop);
  } catch (const Error& err) {
    prop.passed = false;
    prop.detail = std::string("error ") + to_string(err.kind()) + ": " + err.what();
  }
  return prop;
}

std::string artifact_of(Payload payload, const ExponentInput& e) {
  return dump_document(Document{std::move(payload), e, std::nullopt, "counterexample"});
}

Rng batch_rng(std::uint64_t seed, std::uint64_t salt, int i) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(salt), static_cast<std::uint32_t>(i)};
  return Rng(seq);
}

SamplingOptions sampling(const VerifyOptions& o, std::uint64_t seed) {
  SamplingOptions s;
  s.samples = o.samples;
  s.seed = seed;
  return s;
}

struct SummingOutcome {
  double duality = 0.0;
  double violation = 0.0;
  double witness_gap = 0.0;
  double value = 0.0;
};

SummingOutcome summing_check(const Instance& inst, double p) {
  const DominationCertificate cert = pietsch_norm_lp(inst, p);
  SummingOutcome out;
  out.value = cert.delta;
  out.duality = std::abs(cert.lp_value - cert.dual_value) / std::max(1.0, std::abs(cert.lp_value));
  const double qmax = inst.q().size() ? inst.q().cwiseAbs().maxCoeff() : 0.0;
  out.violation = cert.max_violation / std::max(1.0, std::pow(qmax, p));
  if (cert.delta > 0.0) {
    const WeightedFamily wit = witness_from_dual(inst, cert.probe_dual, p);
    const double ratio = strong_sum(inst, wit, p) / weak_sup(inst, wit, p, Side::k);
    out.witness_gap = rel_diff(ratio, cert.delta);
  }
  return out;
}

struct SandwichOutcome {
  MixingUpperResult upper;
  double lower = 0.0;
  double gap = 0.0;
};

SandwichOutcome sandwich(const Instance& inst, const ExponentParams& e, int depth, const SamplingOptions& base) {
  SandwichOutcome out;
  out.upper = mixing_upper_domination(inst, e, depth);
  SamplingOptions so = base;
  if (!out.upper.witness.empty()) so.injected = {out.upper.witness};
  try {
    out.lower = mixing_lower_bound(inst, e, so).value;
  } catch (const Error& err) {
    if (err.kind() != ErrorKind::degenerate) throw;
    out.lower = 0.0;
  }
  out.gap = out.upper.value > 0.0 ? (out.upper.value - out.lower) / out.upper.value : 0.0;
  return out;
}

bool sandwich_ok(const SandwichOutcome& s) {
  return s.lower <= s.upper.value * (1.0 + 1e-9) + 1e-12 && s.gap <= 0.05 &&
         s.upper.certificate.max_violation <= 1e-9;
}

double expected_pi(const Instance& inst) { return inst.m().cwiseAbs().maxCoeff() > 0.0 ? 1.0 : 0.0; }

void instance_checks(const std::string& label, const Instance& inst, const Document& doc, const VerifyOptions& o,
                     VerifyReport& report) {
  const Exponents ex = resolve(doc.exponents);
  report.add(guarded(label + ": summing norm duality", [&](Property& prop) {
    try {
      const SummingOutcome s = summing_check(inst, ex.p);
      prop.passed = s.duality <= 1e-9 && s.violation <= 1e-9 && s.witness_gap <= 1e-6;
      prop.detail = Detail().add("value", s.value).add("duality_gap", s.duality).add("violation", s.violation)
                        .add("witness_gap", s.witness_gap).str();
    } catch (const Error& err) {
      if (err.kind() != ErrorKind::not_summable) throw;
      prop.detail = "value=inf (not summable)";
    }
  }));

  if (inst.sizes().w > kMaxMixingPoints || ex.q > ex.s) return;
  const ExponentParams e = ExponentParams::mixing(ex.q, ex.s);
  std::optional<MixingUpperResult> upper;
  report.add(guarded(label + ": mixing sandwich", [&](Property& prop) {
    try {
      const SandwichOutcome s = sandwich(inst, e, o.grid_depth, sampling(o, o.seed));
      upper = s.upper;
      prop.passed = sandwich_ok(s);
      prop.detail = Detail().add("upper", s.upper.value).add("lower", s.lower).add("gap", s.gap)
                        .add("violation", s.upper.certificate.max_violation).str();
    } catch (const Error& err) {
      if (err.kind() != ErrorKind::not_mixing) throw;
      prop.detail = "value=inf (not mixing)";
    }
  }));
  if (!upper) return;

  if (doc.ball) {
    report.add(guarded(label + ": seminorm coherence", [&](Property& prop) {
      SeminormCheckOptions so;
      so.samples = o.samples / 2;
      so.seed = o.seed;
      if (!upper->witness.empty()) so.injected = {upper->witness};
      const SeminormCheck c = check_seminorm_characterization(inst, *doc.ball, e, upper->value, so);
      const double gap = rel_diff(c.max_ratio, upper->value);
      prop.passed = c.holds && gap <= 1e-4;
      prop.detail = Detail().add("max_ratio", c.max_ratio).add("upper", upper->value).add("gap", gap).str();
    }));
  }
  if (ex.s >= 1.0) {
    report.add(guarded(label + ": embedding norm", [&](Property& prop) {
      const EmbeddingResult j = build_embedding_Jmu(inst, upper->worst_mu, ex.s);
      const double want = expected_pi(inst);
      prop.passed = std::abs(j.pi_check - want) <= 1e-9 && j.domination_gap <= 1e-12;
      prop.detail = Detail().add("pi", j.pi_check).add("expected", want).add("domination_gap", j.domination_gap).str();
    }));
  }
}

void two_layer_checks(const std::string& label, const TwoLayerInstance& two, const Document& doc,
                      const VerifyOptions& o, VerifyReport& report) {
  const Exponents ex = resolve(doc.exponents);
  const ConditionReport cond = check_conditions(two);
  report.add(guarded(label + ": composition conditions", [&](Property& prop) {
    prop.passed = cond.admissible(1e-12);
    Detail d;
    for (const auto* r : {&cond.q_bound, &cond.m_bound, &cond.h_bound}) d.add(r->name, r->worst);
    prop.detail = d.str();
  }));
  if (!cond.admissible(1e-12)) return;
  auto inequality = [&](const std::string& name, auto&& run) {
    report.add(guarded(label + ": " + name, [&](Property& prop) {
      const InequalityCheck c = run();
      prop.passed = c.holds;
      prop.detail = Detail().add("lhs", c.lhs).add("rhs", c.rhs).str();
    }));
  };
  inequality("composition summing", [&] {
    return check_composition_summing(two, ExponentParams::mixing(ex.q, ex.s), o.grid_depth);
  });
  inequality("inclusion", [&] {
    return check_inclusion(two.mixing_layer(), ExponentParams::mixing(ex.q, ex.t), ExponentParams::mixing(ex.q, ex.s),
                           o.grid_depth);
  });
  inequality("composition mixing", [&] { return check_composition_mixing(two, ex.q, ex.s, ex.t, o.grid_depth); });
}

struct ReductionOutcome {
  double multi = 0.0;
  double single = 0.0;
  double gap = 0.0;
};

ReductionOutcome reduction(const MultilinearInstance& mi, const VerifyOptions& o, std::uint64_t seed) {
  MultiSamplingOptions mo;
  mo.samples = o.samples;
  mo.seed = seed;
  const Instance inst = reduce_t1(mi);
  ReductionOutcome out;
  out.multi = multi_mixing_lower_bound(mi, mo).value;
  out.single = mixing_lower_bound(inst, ExponentParams::make(mi.p()(0), mi.q(), mi.s()), sampling(o, seed)).value;
  out.gap = rel_diff(out.multi, out.single);
  return out;
}

double case_boundary_gap(const MultilinearInstance& mi, const SeminormBallModel& ball, const VerifyOptions& o,
                         std::uint64_t seed) {
  MultiCheckOptions mo;
  mo.samples = o.samples / 2;
  mo.seed = seed;
  mo.path = CasePath::closed_form;
  const double closed = multi_characterization_check(mi, ball, kInfinity, mo).max_ratio;
  mo.path = CasePath::general;
  const double general = multi_characterization_check(mi, ball, kInfinity, mo).max_ratio;
  return rel_diff(closed, general);
}

void multilinear_checks(const std::string& label, const MultilinearInstance& mi, const Document& doc,
                        const VerifyOptions& o, VerifyReport& report) {
  const bool t1 = mi.sizes().a.size() == 1 && mi.sizes().kernels() == 1;
  if (t1) {
    report.add(guarded(label + ": one-factor reduction", [&](Property& prop) {
      const ReductionOutcome r = reduction(mi, o, o.seed);
      prop.passed = r.gap <= 1e-12;
      prop.detail = Detail().add("multilinear", r.multi).add("single", r.single).add("gap", r.gap).str();
    }));
  } else {
    report.add(guarded(label + ": sampled lower bound", [&](Property& prop) {
      MultiSamplingOptions mo;
      mo.samples = o.samples;
      mo.seed = o.seed;
      const double v = multi_mixing_lower_bound(mi, mo).value;
      prop.passed = std::isfinite(v) && v >= 0.0;
      prop.detail = Detail().add("lower", v).str();
    }));
  }
  if (doc.ball && mi.q() == mi.s()) {
    report.add(guarded(label + ": case boundary", [&](Property& prop) {
      const double gap = case_boundary_gap(mi, *doc.ball, o, o.seed);
      prop.passed = gap <= 1e-9;
      prop.detail = Detail().add("gap", gap).str();
    }));
  }
}

struct ClassicalOutcome {
  MixingUpperResult abstract;
  double classical = 0.0;
  double gap = 0.0;
};

ClassicalOutcome classical_linear(const LinearOperatorSpec& spec, const Exponents& ex, int depth) {
  ClassicalOutcome out;
  out.abstract = mixing_upper_domination(build_linear_instance(spec), ExponentParams::mixing(ex.q, ex.s), depth);
  out.classical = linear_mixing_classical(spec, ex.q, ex.s, depth).value;
  out.gap = rel_diff(out.abstract.value, out.classical);
  return out;
}

ClassicalOutcome classical_lipschitz(const LipschitzMapSpec& spec, const Exponents& ex, int depth) {
  ClassicalOutcome out;
  out.abstract = mixing_upper_domination(build_lipschitz_instance(spec), ExponentParams::mixing(ex.q, ex.s), depth);
  out.classical = lipschitz_mixing_classical(spec, ex.q, ex.s, depth).value;
  out.gap = rel_diff(out.abstract.value, out.classical);
  return out;
}

template <typename Spec, typename Classical, typename Build>
void adapter_checks(const std::string& label, const Spec& spec, const Document& doc, const VerifyOptions& o,
                    Classical&& classical, Build&& build, VerifyReport& report) {
  const Exponents ex = resolve(doc.exponents);
  std::optional<SimplexMeasure> worst;
  report.add(guarded(label + ": classical coherence", [&](Property& prop) {
    const ClassicalOutcome c = classical(spec, ex, o.grid_depth);
    worst = c.abstract.worst_mu;
    prop.passed = c.gap <= 1e-6;
    prop.detail = Detail().add("abstract", c.abstract.value).add("classical", c.classical).add("gap", c.gap).str();
  }));
  if (!worst || ex.s < 1.0) return;
  report.add(guarded(label + ": embedding norm", [&](Property& prop) {
    const Instance inst = build(spec);
    const EmbeddingResult j = build_embedding_Jmu(inst, *worst, ex.s);
    const double want = expected_pi(inst);
    prop.passed = std::abs(j.pi_check - want) <= 1e-9;
    prop.detail = Detail().add("pi", j.pi_check).add("expected", want).str();
  }));
}

struct MixedOutcome {
  double sup = 0.0;
  double other = 0.0;
  double gap = 0.0;
  double tau_gap = 0.0;
};

MixedOutcome boundary_check(const MixedFamilyValues& vals, double q) {
  MixedOutcome out;
  out.sup = mixed_norm_closed_qq(vals, q);
  out.other = mixed_norm_sup_measure(vals, ExponentParams::make(q, q, q + 1e-9)).value;
  out.gap = rel_diff(out.sup, out.other);
  return out;
}

MixedOutcome tau_check(const MixedFamilyValues& vals, const ExponentParams& e, std::uint64_t seed) {
  MixedOutcome out;
  const MixedNormResult r = mixed_norm_sup_measure(vals, e);
  out.sup = r.value;
  out.other = mixed_norm_tau_search(vals, e, 3, seed);
  out.gap = rel_diff(out.sup, out.other);
  out.tau_gap = rel_diff(tau_from_measure(vals, e, r.mu_star, 1e-9).product, r.value);
  return out;
}

void mixed_checks(const std::string& label, const MixedFamilyValues& vals, const Document& doc,
                  const VerifyOptions& o, VerifyReport& report) {
  const Exponents ex = resolve(doc.exponents);
  if (ex.q == ex.s) {
    report.add(guarded(label + ": closed form boundary", [&](Property& prop) {
      const MixedOutcome m = boundary_check(vals, ex.q);
      prop.passed = m.gap <= 1e-4;
      prop.detail = Detail().add("closed", m.sup).add("near_boundary", m.other).add("gap", m.gap).str();
    }));
    return;
  }
  report.add(guarded(label + ": measure and tau forms", [&](Property& prop) {
    const MixedOutcome m = tau_check(vals, ExponentParams::make(ex.q, ex.q, ex.s), o.seed);
    prop.passed = m.gap <= 1e-5 && m.tau_gap <= 1e-5;
    prop.detail = Detail().add("sup_measure", m.sup).add("tau_search", m.other).add("gap", m.gap)
                      .add("tau_from_measure_gap", m.tau_gap).str();
  }));
}

/// Accumulates the worst value of a batch and the first counterexample.
struct Batch {
  Property prop;
  std::vector<std::pair<std::string, double>> worst;

  explicit Batch(std::string name) : prop{std::move(name), true, {}, {}} {}

  void track(const std::string& key, double value) {
    for (auto& [k, v] : worst) {
      if (k == key) {
        v = std::max(v, value);
        return;
      }
    }
    worst.emplace_back(key, value);
  }
  void fail(const std::string& artifact) {
    if (prop.passed) prop.artifact = artifact;
    prop.passed = false;
  }
  Property finish(int count) {
    Detail d;
    d.add("cases", count);
    for (const auto& [k, v] : worst) d.add("max_" + k, v);
    if (!prop.detail.empty()) d.note(prop.detail);
    prop.detail = d.str();
    return prop;
  }
};

template <typename F>
void run_batch(VerifyReport& report, const std::string& name, const VerifyOptions& o, std::uint64_t salt, F&& body) {
  Batch batch(name);
  for (int i = 0; i < o.batch; ++i) {
    Rng rng = batch_rng(o.seed, salt, i);
    try {
      body(rng, i, batch);
    } catch (const Error& err) {
      if (batch.prop.passed) {
        batch.prop.detail = "case " + std::to_string(i) + " error " + to_string(err.kind()) + ": " + err.what();
      }
      batch.prop.passed = false;
    }
  }
  report.add(batch.finish(o.batch));
}

}  // namespace

VerifyReport verify_document(const std::string& label, const Document& doc, const VerifyOptions& o) {
  VerifyReport report;
  std::visit(
      [&](const auto& payload) {
        using T = std::decay_t<decltype(payload)>;
        if constexpr (std::is_same_v<T, Instance>) {
          instance_checks(label, payload, doc, o, report);
        } else if constexpr (std::is_same_v<T, TwoLayerInstance>) {
          two_layer_checks(label, payload, doc, o, report);
        } else if constexpr (std::is_same_v<T, MultilinearInstance>) {
          multilinear_checks(label, payload, doc, o, report);
        } else if constexpr (std::is_same_v<T, LinearOperatorSpec>) {
          adapter_checks(label, payload, doc, o, classical_linear, build_linear_instance, report);
        } else if constexpr (std::is_same_v<T, LipschitzMapSpec>) {
          adapter_checks(label, payload, doc, o, classical_lipschitz, build_lipschitz_instance, report);
        } else {
          mixed_checks(label, payload, doc, o, report);
        }
      },
      doc.payload);
  return report;
}

VerifyReport verify_random(const VerifyOptions& o) {
  VerifyReport report;
  const double exps[] = {0.5, 1.0, 2.0};

  run_batch(report, "random: summing norm duality", o, 1, [&](Rng& rng, int i, Batch& b) {
    const Instance inst = random_instance(rng, random_sizes(rng, {4, 2, 2, 5, 1}));
    const double p = exps[i % 3];
    const SummingOutcome s = summing_check(inst, p);
    b.track("duality_gap", s.duality);
    b.track("witness_gap", s.witness_gap);
    if (s.duality > 1e-9 || s.violation > 1e-9 || s.witness_gap > 1e-6) b.fail(artifact_of(inst, {p, {}, {}, {}}));
  });

  run_batch(report, "random: closed form boundary", o, 2, [&](Rng& rng, int, Batch& b) {
    const int m = std::uniform_int_distribution<int>(1, 6)(rng);
    const int n = std::uniform_int_distribution<int>(1, 4)(rng);
    const MixedFamilyValues vals = random_mixed_values(rng, m, n);
    const double q = std::uniform_real_distribution<double>(0.5, 3.0)(rng);
    const MixedOutcome r = boundary_check(vals, q);
    b.track("gap", r.gap);
    if (r.gap > 1e-4) b.fail(artifact_of(vals, {q, q, q, {}}));
  });

  run_batch(report, "random: measure and tau forms", o, 3, [&](Rng& rng, int i, Batch& b) {
    const int m = std::uniform_int_distribution<int>(1, 6)(rng);
    const int n = std::uniform_int_distribution<int>(1, 4)(rng);
    const MixedFamilyValues vals = random_mixed_values(rng, m, n);
    const double q = std::uniform_real_distribution<double>(0.5, 2.0)(rng);
    const double s = q * std::uniform_real_distribution<double>(1.5, 3.0)(rng);
    const MixedOutcome r = tau_check(vals, ExponentParams::make(q, q, s), o.seed + static_cast<std::uint64_t>(i));
    b.track("gap", r.gap);
    b.track("tau_from_measure_gap", r.tau_gap);
    if (r.gap > 1e-5 || r.tau_gap > 1e-5) b.fail(artifact_of(vals, {q, q, s, {}}));
  });

  run_batch(report, "random: mixing sandwich", o, 4, [&](Rng& rng, int i, Batch& b) {
    const Instance inst = random_instance(rng, random_sizes(rng, {3, 2, 2, 3, 2}));
    const SandwichOutcome s =
        sandwich(inst, ExponentParams::mixing(1.0, 2.0), o.grid_depth, sampling(o, o.seed + static_cast<std::uint64_t>(i)));
    b.track("gap", s.gap);
    b.track("violation", s.upper.certificate.max_violation);
    if (!sandwich_ok(s)) b.fail(artifact_of(inst, {1.0, 1.0, 2.0, {}}));
  });

  run_batch(report, "random: seminorm coherence", o, 5, [&](Rng& rng, int i, Batch& b) {
    const LinearWitness lw = random_linear_witness(rng, random_sizes(rng, {3, 2, 2, 3, 1}), infinity_ball(2));
    const ExponentParams e = ExponentParams::mixing(1.0, 2.0);
    const MixingUpperResult up = mixing_upper_domination(lw.instance, e, o.grid_depth);
    SeminormCheckOptions so;
    so.samples = o.samples / 2;
    so.seed = o.seed + static_cast<std::uint64_t>(i);
    if (!up.witness.empty()) so.injected = {up.witness};
    const SeminormCheck c = check_seminorm_characterization(lw.instance, lw.ball, e, up.value, so);
    const double gap = rel_diff(c.max_ratio, up.value);
    b.track("gap", gap);
    if (!c.holds || gap > 1e-4) {
      b.fail(dump_document(Document{lw.instance, {1.0, 1.0, 2.0, {}}, lw.ball, "counterexample"}));
    }
  });

  auto two_layer_batch = [&](const std::string& name, std::uint64_t salt, auto&& check) {
    run_batch(report, name, o, salt, [&](Rng& rng, int, Batch& b) {
      auto pick = [&](int n) { return std::uniform_int_distribution<int>(1, n)(rng); };
      const TwoLayerSizes z{pick(3), pick(3), pick(2), pick(2), pick(2), pick(3), pick(2)};
      const TwoLayerInstance two = random_two_layer(rng, z);
      const InequalityCheck c = check(two);
      b.track("ratio", c.rhs > 0.0 ? c.lhs / c.rhs : 0.0);
      if (!c.holds) b.fail(artifact_of(two, {1.0, 1.0, 2.0, 4.0}));
    });
  };
  two_layer_batch("random: composition summing", 6, [&](const TwoLayerInstance& two) {
    return check_composition_summing(two, ExponentParams::mixing(1.0, 2.0), o.grid_depth);
  });
  run_batch(report, "random: inclusion", o, 7, [&](Rng& rng, int, Batch& b) {
    const Instance inst = random_instance(rng, random_sizes(rng, {3, 2, 2, 3, 2}));
    const InequalityCheck c =
        check_inclusion(inst, ExponentParams::mixing(1.0, 3.0), ExponentParams::mixing(1.5, 2.0), o.grid_depth);
    b.track("ratio", c.rhs > 0.0 ? c.lhs / c.rhs : 0.0);
    if (!c.holds) b.fail(artifact_of(inst, {{}, {}, {}, {}}));
  });
  two_layer_batch("random: composition mixing", 8,
                  [&](const TwoLayerInstance& two) { return check_composition_mixing(two, 1.0, 2.0, 4.0, o.grid_depth); });

  run_batch(report, "random: one-factor reduction", o, 9, [&](Rng& rng, int i, Batch& b) {
    const Instance inst = random_instance(rng, random_sizes(rng, {3, 2, 2, 3, 3}));
    const MultilinearInstance mi = lift_instance(inst, 1.0, 2.0);
    const ReductionOutcome r = reduction(mi, o, o.seed + static_cast<std::uint64_t>(i));
    b.track("gap", r.gap);
    if (r.gap > 1e-12) b.fail(artifact_of(mi, {}));
  });

  run_batch(report, "random: case boundary", o, 10, [&](Rng& rng, int i, Batch& b) {
    const LinearWitness lw = random_linear_witness(rng, random_sizes(rng, {3, 2, 2, 3, 1}), infinity_ball(2));
    const MultilinearInstance mi = lift_instance(lw.instance, 1.5, 1.5);
    const double gap = case_boundary_gap(mi, lw.ball, o, o.seed + static_cast<std::uint64_t>(i));
    b.track("gap", gap);
    if (gap > 1e-9) b.fail(dump_document(Document{mi, {}, lw.ball, "counterexample"}));
  });

  run_batch(report, "random: embedding norm", o, 11, [&](Rng& rng, int, Batch& b) {
    const Instance inst = random_instance(rng, random_sizes(rng, {3, 2, 2, 3, 3}));
    Vector raw(inst.sizes().w);
    for (Index w = 0; w < raw.size(); ++w) raw(w) = std::uniform_real_distribution<double>(0.0, 1.0)(rng);
    const EmbeddingResult j = build_embedding_Jmu(inst, SimplexMeasure::normalized(raw), 2.0);
    const double err = std::abs(j.pi_check - expected_pi(inst));
    b.track("pi_error", err);
    if (err > 1e-9) b.fail(artifact_of(inst, {{}, {}, 2.0, {}}));
  });

  run_batch(report, "random: linear classical coherence", o, 12, [&](Rng& rng, int, Batch& b) {
    const LinearOperatorSpec spec = random_linear_spec(rng, 2, 2);
    const ClassicalOutcome c = classical_linear(spec, {1.0, 1.0, 2.0, 4.0}, o.grid_depth);
    b.track("gap", c.gap);
    if (c.gap > 1e-6) b.fail(artifact_of(spec, {1.0, 1.0, 2.0, {}}));
  });

  run_batch(report, "random: lipschitz classical coherence", o, 13, [&](Rng& rng, int, Batch& b) {
    const LipschitzMapSpec spec = random_lipschitz_spec(rng, 4, 3);
    const ClassicalOutcome c = classical_lipschitz(spec, {1.0, 1.0, 2.0, 4.0}, o.grid_depth);
    b.track("gap", c.gap);
    if (c.gap > 1e-6) b.fail(artifact_of(spec, {1.0, 1.0, 2.0, {}}));
  });

  return report;
}

VerifyReport verify_suite(const std::vector<std::pair<std::string, Document>>& docs, const VerifyOptions& options) {
  VerifyReport report;
  for (const auto& [label, doc] : docs) report.append(verify_document(label, doc, options));
  report.append(verify_random(options));
  return report;
}

}  // namespace mixlab
