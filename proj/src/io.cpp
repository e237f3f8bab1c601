#include "mixlab/io.hpp"

#include <fstream>
#include <sstream>

#include "json.hpp"

namespace mixlab {

using Json = nlohmann::ordered_json;

namespace {

[[noreturn]] void schema(const std::string& what) { throw Error(ErrorKind::schema, what); }

const Json& field(const Json& j, const char* key, const std::string& where) {
  if (!j.is_object()) schema(where + " must be an object");
  const auto it = j.find(key);
  if (it == j.end()) schema(where + " is missing field '" + key + "'");
  return *it;
}

int size_field(const Json& j, const char* key, const std::string& where) {
  const Json& v = field(j, key, where);
  if (!v.is_number_integer() || v.get<long long>() < 1 || v.get<long long>() > 1'000'000) {
    schema("size '" + std::string(key) + "' in " + where + " must be a positive integer");
  }
  return v.get<int>();
}

std::vector<int> size_list(const Json& j, const char* key, const std::string& where) {
  const Json& v = field(j, key, where);
  if (!v.is_array() || v.empty()) schema("size list '" + std::string(key) + "' must be a nonempty array");
  std::vector<int> out;
  for (const auto& x : v) {
    if (!x.is_number_integer() || x.get<long long>() < 1) {
      schema("size list '" + std::string(key) + "' must hold positive integers");
    }
    out.push_back(x.get<int>());
  }
  return out;
}

double number(const Json& v, const std::string& name) {
  if (!v.is_number()) schema("field '" + name + "' must be a number");
  return v.get<double>();
}

Vector flat(const Json& j, const char* key, Index expected) {
  const Json& v = field(j, key, "document");
  if (!v.is_array()) schema("field '" + std::string(key) + "' must be an array");
  if (static_cast<Index>(v.size()) != expected) {
    schema("field '" + std::string(key) + "' has length " + std::to_string(v.size()) + ", expected " +
           std::to_string(expected));
  }
  Vector out(expected);
  for (Index i = 0; i < expected; ++i) out(i) = number(v[static_cast<std::size_t>(i)], key);
  return out;
}

Matrix flat_matrix(const Json& j, const char* key, Index rows, Index cols) {
  const Vector v = flat(j, key, rows * cols);
  Matrix out(rows, cols);
  for (Index r = 0; r < rows; ++r) {
    for (Index c = 0; c < cols; ++c) out(r, c) = v(r * cols + c);
  }
  return out;
}

/// A matrix whose row count is implied by the array length.
Matrix flat_rows(const Json& j, const char* key, Index cols) {
  const Json& v = field(j, key, "document");
  if (!v.is_array() || v.empty() || v.size() % static_cast<std::size_t>(cols) != 0) {
    schema("field '" + std::string(key) + "' must be a nonempty array whose length is a multiple of " +
           std::to_string(cols));
  }
  return flat_matrix(j, key, static_cast<Index>(v.size()) / cols, cols);
}

std::vector<int> index_list(const Json& j, const char* key, std::size_t expected) {
  const Json& v = field(j, key, "document");
  if (!v.is_array() || v.size() != expected) {
    schema("field '" + std::string(key) + "' must be an array of length " + std::to_string(expected));
  }
  std::vector<int> out;
  for (const auto& x : v) {
    if (!x.is_number_integer()) schema("field '" + std::string(key) + "' must hold integers");
    out.push_back(x.get<int>());
  }
  return out;
}

Json to_flat(const Matrix& m) {
  Json out = Json::array();
  for (Index r = 0; r < m.rows(); ++r) {
    for (Index c = 0; c < m.cols(); ++c) out.push_back(m(r, c));
  }
  return out;
}

Json to_flat(const Vector& v) {
  Json out = Json::array();
  for (Index i = 0; i < v.size(); ++i) out.push_back(v(i));
  return out;
}

ExponentInput parse_exponents(const Json& j) {
  ExponentInput e;
  const auto it = j.find("exponents");
  if (it == j.end()) return e;
  if (!it->is_object()) schema("'exponents' must be an object");
  auto get = [&](const char* key, std::optional<double>& out) {
    const auto f = it->find(key);
    if (f == it->end()) return;
    out = number(*f, std::string("exponents.") + key);
    if (!(*out > 0.0) || !std::isfinite(*out)) {
      throw Error(ErrorKind::invariant, std::string("exponent ") + key + " must be a positive finite real");
    }
  };
  get("p", e.p);
  get("q", e.q);
  get("s", e.s);
  get("t", e.t);
  if (e.q && e.s && *e.q > *e.s) throw Error(ErrorKind::invariant, "exponents must satisfy q <= s");
  if (e.p && e.q && *e.p > *e.q) throw Error(ErrorKind::invariant, "exponents must satisfy p <= q");
  if (e.s && e.t && *e.s > *e.t) throw Error(ErrorKind::invariant, "exponents must satisfy s <= t");
  return e;
}

Instance parse_instance(const Json& j) {
  const Json& z = field(j, "sizes", "document");
  const InstanceSizes sizes{size_field(z, "a", "sizes"), size_field(z, "c", "sizes"), size_field(z, "g", "sizes"),
                            size_field(z, "k", "sizes"), size_field(z, "w", "sizes")};
  const Index n = sizes.probes();
  return Instance(sizes, flat(j, "Q", n), flat_matrix(j, "H", n, sizes.k), flat_matrix(j, "M", n, sizes.w));
}

SeminormBallModel parse_ball(const Json& b) {
  SeminormBallModel ball;
  ball.d = size_field(b, "d", "ball");
  ball.functionals = flat_rows(b, "functionals", ball.d);
  ball.vertices = flat_rows(b, "vertices", ball.d);
  ball.m_coeff = flat_rows(b, "m_coeff", ball.d);
  return ball;
}

TwoLayerInstance parse_two_layer(const Json& j) {
  const Json& z = field(j, "sizes", "document");
  const TwoLayerSizes sizes{size_field(z, "a", "sizes"), size_field(z, "b", "sizes"),  size_field(z, "c", "sizes"),
                            size_field(z, "c1", "sizes"), size_field(z, "g", "sizes"), size_field(z, "k", "sizes"),
                            size_field(z, "w", "sizes")};
  const Index outer = static_cast<Index>(sizes.b) * sizes.c1 * sizes.g;
  const Index inner = static_cast<Index>(sizes.a) * sizes.c * sizes.g;
  return TwoLayerInstance(sizes, index_list(j, "T_map", static_cast<std::size_t>(sizes.a)),
                          index_list(j, "c_map", static_cast<std::size_t>(sizes.c)), flat(j, "Q1", outer),
                          flat_matrix(j, "H1", outer, sizes.w), flat_matrix(j, "M1", outer, sizes.w),
                          flat(j, "Q2", inner), flat_matrix(j, "H", inner, sizes.k), flat_matrix(j, "M", inner, sizes.w),
                          flat_matrix(j, "M2", inner, sizes.w));
}

MultilinearInstance parse_multilinear(const Json& j) {
  const Json& z = field(j, "sizes", "document");
  MultilinearSizes sizes{size_list(z, "a", "sizes"), size_list(z, "c", "sizes"), size_list(z, "g", "sizes"),
                         size_list(z, "k", "sizes"), size_field(z, "w", "sizes")};
  if (sizes.g.size() != sizes.k.size()) schema("sizes.g and sizes.k must have the same length");
  const Index ac = static_cast<Index>(sizes.joint_a()) * sizes.joint_c();
  const Json& hs = field(j, "H", "document");
  if (!hs.is_array() || hs.size() != sizes.k.size()) schema("field 'H' must hold one array per kernel");
  std::vector<Matrix> h;
  for (std::size_t k = 0; k < sizes.k.size(); ++k) {
    Json wrap;
    wrap["H"] = hs[k];
    h.push_back(flat_matrix(wrap, "H", ac * sizes.g[k], sizes.k[k]));
  }
  const Matrix m = flat_matrix(j, "M", ac * sizes.joint_g(), sizes.w);
  const Json& e = field(j, "exponents", "document");
  const Json& p_list = field(e, "p", "exponents");
  if (!p_list.is_array() || p_list.size() != sizes.k.size()) schema("exponents.p must hold one value per kernel");
  Vector p(static_cast<Index>(p_list.size()));
  for (std::size_t k = 0; k < p_list.size(); ++k) p(static_cast<Index>(k)) = number(p_list[k], "exponents.p");
  const double q = number(field(e, "q", "exponents"), "exponents.q");
  const double s = number(field(e, "s", "exponents"), "exponents.s");
  try {
    return MultilinearInstance(std::move(sizes), std::move(h), m, p, q, s);
  } catch (const Error& err) {
    if (err.kind() == ErrorKind::parameter) throw Error(ErrorKind::invariant, err.what());
    throw;
  }
}

LinearOperatorSpec parse_linear(const Json& j) {
  const Json& z = field(j, "sizes", "document");
  const int n_e = size_field(z, "e", "sizes");
  const int n_f = size_field(z, "f", "sizes");
  LinearOperatorSpec spec;
  spec.t = flat_matrix(j, "T", n_f, n_e);
  const auto nets = j.find("nets");
  spec.k_net = coordinate_net(n_e);
  spec.w_net = coordinate_net(n_f);
  if (nets != j.end()) {
    if (nets->contains("K")) spec.k_net = flat_rows(*nets, "K", n_e);
    if (nets->contains("W")) spec.w_net = flat_rows(*nets, "W", n_f);
  }
  spec.probes = j.contains("probes") ? flat_rows(j, "probes", n_e) : default_probes(n_e);
  spec.validate();
  return spec;
}

LipschitzMapSpec parse_lipschitz(const Json& j) {
  const Json& z = field(j, "sizes", "document");
  const int n_x = size_field(z, "x", "sizes");
  const int n_y = size_field(z, "y", "sizes");
  LipschitzMapSpec spec;
  spec.dx = flat_matrix(j, "dX", n_x, n_x);
  spec.dy = flat_matrix(j, "dY", n_y, n_y);
  spec.map = index_list(j, "T_map", static_cast<std::size_t>(n_x));
  const auto nets = j.find("nets");
  const bool has_k = nets != j.end() && nets->contains("K");
  const bool has_w = nets != j.end() && nets->contains("W");
  spec.k_net = has_k ? flat_rows(*nets, "K", n_x) : distance_net(spec.dx);
  spec.w_net = has_w ? flat_rows(*nets, "W", n_y) : distance_net(spec.dy);
  spec.validate();
  return spec;
}

MixedFamilyValues parse_mixed(const Json& j) {
  const Json& z = field(j, "sizes", "document");
  const int m = size_field(z, "m", "sizes");
  const int w = size_field(z, "w", "sizes");
  const Vector sigma = flat(j, "sigma", m);
  for (Index i = 0; i < sigma.size(); ++i) {
    if (sigma(i) == 0.0) throw Error(ErrorKind::invariant, "sigma entries must be nonzero");
  }
  return MixedFamilyValues(sigma, flat_matrix(j, "M", m, w));
}

Json dump_ball(const SeminormBallModel& ball) {
  Json b;
  b["d"] = ball.d;
  b["functionals"] = to_flat(ball.functionals);
  b["vertices"] = to_flat(ball.vertices);
  b["m_coeff"] = to_flat(ball.m_coeff);
  return b;
}

struct Dumper {
  Json& j;

  void operator()(const Instance& inst) const {
    const auto& z = inst.sizes();
    j["sizes"] = {{"a", z.a}, {"c", z.c}, {"g", z.g}, {"k", z.k}, {"w", z.w}};
    j["Q"] = to_flat(inst.q());
    j["H"] = to_flat(inst.h());
    j["M"] = to_flat(inst.m());
  }
  void operator()(const TwoLayerInstance& two) const {
    const auto& z = two.sizes();
    j["sizes"] = {{"a", z.a}, {"b", z.b}, {"c", z.c}, {"c1", z.c1}, {"g", z.g}, {"k", z.k}, {"w", z.w}};
    j["T_map"] = two.t_map();
    j["c_map"] = two.c_map();
    j["Q1"] = to_flat(two.q1());
    j["H1"] = to_flat(two.h1());
    j["M1"] = to_flat(two.m1());
    j["Q2"] = to_flat(two.q2());
    j["H"] = to_flat(two.h());
    j["M"] = to_flat(two.m());
    j["M2"] = to_flat(two.m2());
  }
  void operator()(const MultilinearInstance& mi) const {
    const auto& z = mi.sizes();
    j["sizes"] = {{"a", z.a}, {"c", z.c}, {"g", z.g}, {"k", z.k}, {"w", z.w}};
    Json hs = Json::array();
    for (const auto& h : mi.h()) hs.push_back(to_flat(h));
    j["H"] = hs;
    j["M"] = to_flat(mi.m());
    j["exponents"] = {{"p", to_flat(mi.p())}, {"q", mi.q()}, {"s", mi.s()}};
  }
  void operator()(const LinearOperatorSpec& spec) const {
    j["sizes"] = {{"e", spec.t.cols()}, {"f", spec.t.rows()}};
    j["T"] = to_flat(spec.t);
    j["nets"] = {{"K", to_flat(spec.k_net)}, {"W", to_flat(spec.w_net)}};
    j["probes"] = to_flat(spec.probes);
  }
  void operator()(const LipschitzMapSpec& spec) const {
    j["sizes"] = {{"x", spec.dx.rows()}, {"y", spec.dy.rows()}};
    j["dX"] = to_flat(spec.dx);
    j["dY"] = to_flat(spec.dy);
    j["T_map"] = spec.map;
    j["nets"] = {{"K", to_flat(spec.k_net)}, {"W", to_flat(spec.w_net)}};
  }
  void operator()(const MixedFamilyValues& vals) const {
    j["sizes"] = {{"m", vals.size()}, {"w", vals.points()}};
    j["sigma"] = to_flat(vals.sigma);
    j["M"] = to_flat(vals.values);
  }
};

}  // namespace

const char* kind_of(const Payload& payload) {
  switch (payload.index()) {
    case 0: return "instance";
    case 1: return "two_layer";
    case 2: return "multilinear";
    case 3: return "linear_operator";
    case 4: return "lipschitz_map";
    case 5: return "mixed_family";
  }
  return "unknown";
}

Document parse_document(const std::string& text) {
  Json j;
  try {
    j = Json::parse(text);
  } catch (const Json::parse_error& err) {
    throw Error(ErrorKind::parse, std::string("malformed JSON: ") + err.what());
  }
  try {
    if (!j.is_object()) schema("document must be a JSON object");
    const Json& version = field(j, "schema_version", "document");
    if (!version.is_number_integer() || version.get<int>() != kSchemaVersion) {
      schema("unsupported schema_version (expected " + std::to_string(kSchemaVersion) + ")");
    }
    const Json& kind_field = field(j, "kind", "document");
    if (!kind_field.is_string()) schema("'kind' must be a string");
    const std::string kind = kind_field.get<std::string>();
    auto build = [&]() -> Payload {
      if (kind == "instance") return parse_instance(j);
      if (kind == "two_layer") return parse_two_layer(j);
      if (kind == "multilinear") return parse_multilinear(j);
      if (kind == "linear_operator") return parse_linear(j);
      if (kind == "lipschitz_map") return parse_lipschitz(j);
      if (kind == "mixed_family") return parse_mixed(j);
      schema("unknown kind '" + kind + "'");
    };
    Document doc{build(), {}, std::nullopt, j.value("name", std::string())};
    if (kind != "multilinear") doc.exponents = parse_exponents(j);
    if (j.contains("ball")) {
      doc.ball = parse_ball(j["ball"]);
      if (const auto* inst = std::get_if<Instance>(&doc.payload)) doc.ball->check_instance(*inst);
      else doc.ball->validate();
    }
    return doc;
  } catch (const Json::exception& err) {
    throw Error(ErrorKind::schema, std::string("schema violation: ") + err.what());
  } catch (const Error& err) {
    if (err.kind() == ErrorKind::model || err.kind() == ErrorKind::index) throw Error(ErrorKind::invariant, err.what());
    if (err.kind() == ErrorKind::parameter) throw Error(ErrorKind::schema, err.what());
    throw;
  }
}

Document load_document(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::parse, "cannot open " + path);
  std::stringstream buffer;
  buffer << in.rdbuf();
  return parse_document(buffer.str());
}

std::string dump_document(const Document& doc) {
  Json j;
  j["schema_version"] = kSchemaVersion;
  j["kind"] = kind_of(doc.payload);
  if (!doc.name.empty()) j["name"] = doc.name;
  std::visit(Dumper{j}, doc.payload);
  if (doc.payload.index() != 2) {
    Json e = Json::object();
    if (doc.exponents.p) e["p"] = *doc.exponents.p;
    if (doc.exponents.q) e["q"] = *doc.exponents.q;
    if (doc.exponents.s) e["s"] = *doc.exponents.s;
    if (doc.exponents.t) e["t"] = *doc.exponents.t;
    if (!e.empty()) j["exponents"] = e;
  }
  if (doc.ball) j["ball"] = dump_ball(*doc.ball);
  return j.dump(2) + "\n";
}

void save_document(const Document& doc, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorKind::parse, "cannot write " + path);
  out << dump_document(doc);
}

int exit_code(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::parse:
    case ErrorKind::parameter:
      return 2;
    case ErrorKind::schema:
    case ErrorKind::index:
      return 3;
    case ErrorKind::invariant:
    case ErrorKind::model:
    case ErrorKind::precondition:
    case ErrorKind::degenerate:
    case ErrorKind::empty_witness:
    case ErrorKind::not_summable:
    case ErrorKind::not_mixing:
      return 4;
    case ErrorKind::solver_failure:
    case ErrorKind::optimization:
      return 5;
  }
  return 2;
}

}  // namespace mixlab
