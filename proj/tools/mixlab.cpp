#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "mixlab/io.hpp"
#include "mixlab/verify.hpp"

#ifndef MIXLAB_DATA_DIR
#define MIXLAB_DATA_DIR "data"
#endif

namespace fs = std::filesystem;
using namespace mixlab;

namespace {

struct RunConfig {
  std::string command;
  std::string instance;
  std::optional<double> p, q, s, t;
  std::uint64_t seed = 42;
  int samples = 1000;
  int grid_depth = 10;
  double tol = 1e-10;
  std::string report = "text";
  std::string out;
};

struct Row {
  std::string quantity;
  double value = 0.0;
  std::optional<double> lower;
  std::optional<double> upper;
  std::optional<double> gap;
  std::string anchor;
};

struct Certificate {
  std::string name;
  std::vector<std::string> labels;
  std::vector<double> values;
};

class Report {
 public:
  explicit Report(std::uint64_t seed) : seed_(seed) {}

  void row(Row r) { rows_.push_back(std::move(r)); }
  void note(const std::string& key, const std::string& value) { notes_.emplace_back(key, value); }

  void vector(const std::string& name, const Vector& v) {
    Certificate c{name, {}, {}};
    for (Index i = 0; i < v.size(); ++i) {
      c.labels.push_back(std::to_string(i));
      c.values.push_back(v(i));
    }
    certs_.push_back(std::move(c));
  }

  void family(const std::string& name, const Instance& inst, const WeightedFamily& fam) {
    Certificate c{name, {}, {}};
    for (const auto& e : fam.entries()) {
      c.labels.push_back("probe(" + std::to_string(e.a) + "," + std::to_string(e.c) + "," + std::to_string(e.g) + ")");
      c.values.push_back(e.sigma);
    }
    fam.probes(inst);
    certs_.push_back(std::move(c));
  }

  std::string text() const {
    std::ostringstream out;
    out << "seed: " << seed_ << '\n';
    for (const auto& [k, v] : notes_) out << k << ": " << v << '\n';
    for (const auto& r : rows_) {
      out << r.quantity << ": " << format_real(r.value);
      if (r.lower) out << "  lower=" << format_real(*r.lower);
      if (r.upper) out << "  upper=" << format_real(*r.upper);
      if (r.gap) out << "  gap=" << format_real(*r.gap);
      out << "  [" << r.anchor << "]\n";
    }
    for (const auto& c : certs_) {
      out << "certificate " << c.name << ":";
      for (std::size_t i = 0; i < c.values.size(); ++i) out << ' ' << c.labels[i] << '=' << format_real(c.values[i]);
      out << '\n';
    }
    return out.str();
  }

  std::string csv() const {
    std::ostringstream out;
    out << "quantity,value,lower_bound,upper_bound,gap,seed,paper_anchor\n";
    auto opt = [](const std::optional<double>& x) { return x ? format_real(*x) : std::string(); };
    for (const auto& r : rows_) {
      out << r.quantity << ',' << format_real(r.value) << ',' << opt(r.lower) << ',' << opt(r.upper) << ','
          << opt(r.gap) << ',' << seed_ << ',' << quoted(r.anchor) << '\n';
    }
    for (const auto& c : certs_) {
      for (std::size_t i = 0; i < c.values.size(); ++i) {
        out << "certificate:" << c.name << '[' << c.labels[i] << "]," << format_real(c.values[i]) << ",,,," << seed_
            << ",certificate\n";
      }
    }
    return out.str();
  }

 private:
  static std::string quoted(const std::string& s) {
    if (s.find_first_of(",\"") == std::string::npos) return s;
    std::string out = "\"";
    for (char ch : s) out += ch == '"' ? std::string("\"\"") : std::string(1, ch);
    return out + '"';
  }

  std::uint64_t seed_;
  std::vector<Row> rows_;
  std::vector<std::pair<std::string, std::string>> notes_;
  std::vector<Certificate> certs_;
};

double pick(const std::optional<double>& flag, const std::optional<double>& doc, double fallback) {
  if (flag) return *flag;
  if (doc) return *doc;
  return fallback;
}

struct Resolved {
  double p, q, s, t;
};

Resolved resolve(const RunConfig& cfg, const Document& doc) {
  Resolved r{};
  r.q = pick(cfg.q, doc.exponents.q, 1.0);
  r.s = pick(cfg.s, doc.exponents.s, r.q);
  r.p = pick(cfg.p, doc.exponents.p, r.q);
  r.t = pick(cfg.t, doc.exponents.t, 2.0 * r.s);
  ExponentParams::make(r.p, r.q, r.s);
  return r;
}

[[noreturn]] void wrong_kind(const Document& doc, const std::string& command, const std::string& want) {
  throw Error(ErrorKind::parameter, "command " + command + " needs a " + want + " document, got " + kind_of(doc.payload));
}

/// Instance kernels of documents that carry one, adapters included.
Instance instance_of(const Document& doc, const std::string& command) {
  if (const auto* inst = std::get_if<Instance>(&doc.payload)) return *inst;
  if (const auto* spec = std::get_if<LinearOperatorSpec>(&doc.payload)) return build_linear_instance(*spec);
  if (const auto* spec = std::get_if<LipschitzMapSpec>(&doc.payload)) return build_lipschitz_instance(*spec);
  wrong_kind(doc, command, "instance");
}

void summing_norm(const RunConfig& cfg, const Document& doc, Report& rep) {
  const Instance inst = instance_of(doc, cfg.command);
  const Resolved ex = resolve(cfg, doc);
  rep.note("p", format_real(ex.p));
  try {
    const DominationCertificate cert = pietsch_norm_lp(inst, ex.p);
    SamplingOptions so;
    so.samples = cfg.samples;
    so.seed = cfg.seed;
    std::optional<double> lower;
    if (cert.delta > 0.0) {
      so.injected = {witness_from_dual(inst, cert.probe_dual, ex.p)};
      const RatioBound lb = ratio_lower_bound(inst, ex.p, so);
      lower = lb.value;
      rep.family("witness", inst, lb.witness);
    }
    rep.row({"summing_norm", cert.delta, lower, cert.delta, lower ? std::optional(cert.delta - *lower) : std::nullopt,
             "p-summing norm as the least Pietsch domination constant"});
    rep.row({"lp_duality_gap", std::abs(cert.lp_value - cert.dual_value), {}, {}, {}, "LP primal minus dual"});
    rep.row({"domination_violation", cert.max_violation, {}, {}, {}, "max over probes of the domination residual"});
    rep.vector("nu", cert.nu.weights());
    rep.vector("probe_dual", cert.probe_dual);
  } catch (const Error& err) {
    if (err.kind() != ErrorKind::not_summable) throw;
    rep.row({"summing_norm", kInfinity, {}, {}, {}, "p-summing norm (not summable)"});
    rep.note("diagnostic", err.what());
  }
}

void mixed_norm_cmd(const RunConfig& cfg, const Document& doc, Report& rep) {
  const auto* vals = std::get_if<MixedFamilyValues>(&doc.payload);
  if (!vals) wrong_kind(doc, cfg.command, "mixed_family");
  const Resolved r = resolve(cfg, doc);
  const ExponentParams e = ExponentParams::make(r.q, r.q, r.s);
  rep.note("q", format_real(r.q));
  rep.note("s", format_real(r.s));
  SupMeasureOptions so;
  so.gap_tolerance = cfg.tol;
  const MixedNormResult res = mixed_norm_sup_measure(*vals, e, so);
  if (e.r_infinite()) {
    const double closed = mixed_norm_closed_qq(*vals, r.q);
    rep.row({"mixed_norm", closed, res.value, closed, closed - res.value, "mixed (s;q)-norm, closed form at q = s"});
  } else {
    const TauProduct tp = tau_from_measure(*vals, e, res.mu_star, 1e-9);
    rep.row({"mixed_norm", res.value, res.value, tp.product, tp.product - res.value,
             "mixed (s;q)-norm as a supremum over probability measures on W"});
    rep.row({"tau_search", mixed_norm_tau_search(*vals, e, 3, cfg.seed), {}, {}, {},
             "infimum over splitting sequences tau"});
    rep.vector("tau", tp.tau);
  }
  rep.row({"frank_wolfe_gap", res.gap, {}, {}, {}, "relative certified duality gap of the measure search"});
  rep.vector("mu_star", res.mu_star.weights());
}

void mixing_constant(const RunConfig& cfg, const Document& doc, Report& rep) {
  const Instance inst = instance_of(doc, cfg.command);
  const Resolved r = resolve(cfg, doc);
  const ExponentParams e = ExponentParams::mixing(r.q, r.s);
  rep.note("q", format_real(r.q));
  rep.note("s", format_real(r.s));
  try {
    const MixingUpperResult up = mixing_upper_domination(inst, e, cfg.grid_depth);
    SamplingOptions so;
    so.samples = cfg.samples;
    so.seed = cfg.seed;
    if (!up.witness.empty()) so.injected = {up.witness};
    std::optional<double> lower;
    try {
      const RatioBound lb = mixing_lower_bound(inst, e, so);
      lower = lb.value;
      rep.family("witness", inst, lb.witness);
    } catch (const Error& err) {
      if (err.kind() != ErrorKind::degenerate) throw;
    }
    rep.row({"mixing_constant", up.value, lower, up.value, lower ? std::optional(up.value - *lower) : std::nullopt,
             "((s;q),q) mixing constant as a supremum of domination constants over measures on W"});
    rep.row({"domination_violation", up.certificate.max_violation, {}, {}, {},
             "domination residual at the worst measure"});
    rep.vector("mu_star", up.worst_mu.weights());
    rep.vector("nu", up.certificate.nu.weights());
  } catch (const Error& err) {
    if (err.kind() != ErrorKind::not_mixing) throw;
    rep.row({"mixing_constant", kInfinity, {}, {}, {}, "((s;q),q) mixing constant (not mixing)"});
    rep.note("diagnostic", err.what());
  }
}

template <typename Spec>
void adapt(const RunConfig& cfg, const Document& doc, Report& rep, const char* want, const char* what) {
  const auto* spec = std::get_if<Spec>(&doc.payload);
  if (!spec) wrong_kind(doc, cfg.command, want);
  const Resolved r = resolve(cfg, doc);
  Instance inst = [&] {
    if constexpr (std::is_same_v<Spec, LinearOperatorSpec>) return build_linear_instance(*spec);
    else return build_lipschitz_instance(*spec);
  }();
  rep.note("q", format_real(r.q));
  rep.note("s", format_real(r.s));
  rep.note("probes", std::to_string(inst.probe_count()));
  const MixingUpperResult up = mixing_upper_domination(inst, ExponentParams::mixing(r.q, r.s), cfg.grid_depth);
  const ClassicalResult cl = [&] {
    if constexpr (std::is_same_v<Spec, LinearOperatorSpec>) return linear_mixing_classical(*spec, r.q, r.s, cfg.grid_depth);
    else return lipschitz_mixing_classical(*spec, r.q, r.s, cfg.grid_depth);
  }();
  rep.row({"mixing_constant", up.value, {}, {}, std::abs(up.value - cl.value),
           std::string("abstract mixing constant of the ") + what});
  rep.row({"classical_constant", cl.value, {}, {}, {}, std::string("classical mixing criterion for the ") + what});
  try {
    const DominationCertificate cert = pietsch_norm_lp(inst, r.q);
    rep.row({"summing_norm", cert.delta, {}, {}, {}, std::string("q-summing norm of the ") + what});
  } catch (const Error& err) {
    if (err.kind() != ErrorKind::not_summable) throw;
    rep.row({"summing_norm", kInfinity, {}, {}, {}, std::string("q-summing norm of the ") + what + " (not summable)"});
  }
  if (r.s >= 1.0) {
    const EmbeddingResult j = build_embedding_Jmu(inst, up.worst_mu, r.s);
    rep.row({"embedding_norm", j.pi_check, {}, {}, {}, "s-summing norm of the evaluation map into L_s(mu)"});
  }
  rep.vector("mu_star", up.worst_mu.weights());
  rep.vector("classical_mu", cl.worst_mu.weights());
  rep.vector("nu", up.certificate.nu.weights());
}

std::vector<std::pair<std::string, Document>> suite_documents(const std::string& path) {
  const fs::path root = path.empty() ? fs::path(MIXLAB_DATA_DIR) : fs::path(path);
  std::vector<fs::path> files;
  if (fs::is_directory(root)) {
    for (const auto& entry : fs::directory_iterator(root)) {
      if (entry.path().extension() == ".json") files.push_back(entry.path());
    }
    std::sort(files.begin(), files.end());
  } else {
    files.push_back(root);
  }
  std::vector<std::pair<std::string, Document>> docs;
  for (const auto& f : files) docs.emplace_back(f.filename().string(), load_document(f.string()));
  return docs;
}

int verify_suite_cmd(const RunConfig& cfg, std::string& output) {
  VerifyOptions o;
  o.seed = cfg.seed;
  o.grid_depth = cfg.grid_depth;
  const VerifyReport report = verify_suite(suite_documents(cfg.instance), o);
  if (cfg.report == "csv") {
    std::ostringstream out;
    out << "quantity,value,lower_bound,upper_bound,gap,seed,paper_anchor\n";
    for (const auto& p : report.properties()) {
      std::string name = p.name;
      std::replace(name.begin(), name.end(), ',', ';');
      out << name << ',' << (p.passed ? 1 : 0) << ",,,," << cfg.seed << ",property check\n";
    }
    output = out.str();
  } else {
    output = "seed: " + std::to_string(cfg.seed) + '\n' + report.text();
  }
  if (const Property* first = report.first_failure()) {
    std::cerr << "first failing property: " << first->name << '\n';
    return 1;
  }
  return 0;
}

int run(const RunConfig& cfg) {
  std::string output;
  int code = 0;
  if (cfg.command == "verify-suite") {
    code = verify_suite_cmd(cfg, output);
  } else {
    if (cfg.instance.empty()) throw Error(ErrorKind::parameter, "--instance is required for " + cfg.command);
    const Document doc = load_document(cfg.instance);
    Report rep(cfg.seed);
    rep.note("command", cfg.command);
    rep.note("kind", kind_of(doc.payload));
    if (!doc.name.empty()) rep.note("name", doc.name);
    if (cfg.command == "summing-norm") summing_norm(cfg, doc, rep);
    else if (cfg.command == "mixed-norm") mixed_norm_cmd(cfg, doc, rep);
    else if (cfg.command == "mixing-constant") mixing_constant(cfg, doc, rep);
    else if (cfg.command == "adapt-linear") adapt<LinearOperatorSpec>(cfg, doc, rep, "linear_operator", "linear operator");
    else adapt<LipschitzMapSpec>(cfg, doc, rep, "lipschitz_map", "Lipschitz map");
    output = cfg.report == "csv" ? rep.csv() : rep.text();
  }
  if (cfg.out.empty()) {
    std::cout << output;
  } else {
    std::ofstream f(cfg.out);
    if (!f) throw Error(ErrorKind::parse, "cannot write " + cfg.out);
    f << output;
  }
  return code;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Summing norms, mixed norms and mixing constants on finite instances"};
  RunConfig cfg;
  const std::vector<std::string> commands{"summing-norm", "mixed-norm",   "mixing-constant",
                                          "verify-suite", "adapt-linear", "adapt-lipschitz"};
  app.add_option("--command", cfg.command, "What to compute")->required()->check(CLI::IsMember(commands));
  app.add_option("--instance", cfg.instance, "Instance JSON file (a file or directory for verify-suite)");
  auto positive = CLI::PositiveNumber;
  app.add_option("--p", cfg.p, "Summing exponent p")->check(positive);
  app.add_option("--q", cfg.q, "Exponent q")->check(positive);
  app.add_option("--s", cfg.s, "Exponent s")->check(positive);
  app.add_option("--t", cfg.t, "Exponent t for composed mixing maps")->check(positive);
  app.add_option("--seed", cfg.seed, "Random seed");
  app.add_option("--samples", cfg.samples, "Random families per lower bound")->check(CLI::PositiveNumber);
  app.add_option("--grid-depth", cfg.grid_depth, "Lattice depth of the measure search")->check(CLI::Range(1, 64));
  app.add_option("--tol", cfg.tol, "Gap tolerance of the measure search")->check(positive);
  app.add_option("--report", cfg.report, "Report format")->check(CLI::IsMember({"text", "csv"}));
  app.add_option("--out", cfg.out, "Write the report here instead of stdout");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << e.what() << "\n\n" << app.help();
    return 2;
  }

  try {
    if (cfg.q && cfg.s && *cfg.q > *cfg.s) throw Error(ErrorKind::parameter, "exponents must satisfy q <= s");
    if (cfg.s && cfg.t && *cfg.s > *cfg.t) throw Error(ErrorKind::parameter, "exponents must satisfy s <= t");
    return run(cfg);
  } catch (const Error& err) {
    std::cerr << "error (" << to_string(err.kind()) << "): " << err.what() << '\n';
    return exit_code(err.kind());
  } catch (const std::exception& err) {
    std::cerr << "error: " << err.what() << '\n';
    return 2;
  }
}
