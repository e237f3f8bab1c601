#pragma once

#include <optional>
#include <string>
#include <variant>

#include "mixlab/adapters.hpp"
#include "mixlab/core.hpp"
#include "mixlab/mixed_norm.hpp"
#include "mixlab/mixing.hpp"
#include "mixlab/multilinear.hpp"

namespace mixlab {

inline constexpr int kSchemaVersion = 1;

/// Optional "exponents" object of a document. Multilinear documents carry
/// their own p vector inside the instance.
struct ExponentInput {
  std::optional<double> p;
  std::optional<double> q;
  std::optional<double> s;
  std::optional<double> t;
};

using Payload = std::variant<Instance, TwoLayerInstance, MultilinearInstance, LinearOperatorSpec, LipschitzMapSpec,
                             MixedFamilyValues>;

struct Document {
  Payload payload;
  ExponentInput exponents;
  /// Present for linear-witness instances.
  std::optional<SeminormBallModel> ball;
  std::string name;
};

/// The "kind" string of a payload.
const char* kind_of(const Payload& payload);

/// Parses a document. Malformed JSON raises ErrorKind::parse, a wrong shape
/// or missing field ErrorKind::schema naming the field, and a violated type
/// invariant ErrorKind::invariant.
Document parse_document(const std::string& text);
Document load_document(const std::string& path);

std::string dump_document(const Document& doc);
void save_document(const Document& doc, const std::string& path);

/// Process exit code for an error kind: 2 usage/parse, 3 schema,
/// 4 invariant, 5 solver failure.
int exit_code(ErrorKind kind);

}  // namespace mixlab
