#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "mixlab/io.hpp"

namespace mixlab {

struct Property {
  std::string name;
  bool passed = true;
  /// Measured values, printed with full precision.
  std::string detail;
  /// A counterexample document for failed checks, empty otherwise.
  std::string artifact;
};

struct VerifyOptions {
  std::uint64_t seed = 42;
  /// Random instances per property in the seeded batches.
  int batch = 10;
  int samples = 200;
  int grid_depth = 10;
};

class VerifyReport {
 public:
  void add(Property p) { properties_.push_back(std::move(p)); }
  void append(const VerifyReport& other);

  const std::vector<Property>& properties() const { return properties_; }
  bool passed() const;
  /// nullptr when everything passed.
  const Property* first_failure() const;

  /// One "PASS name: detail" / "FAIL name: detail" line per property.
  std::string text() const;

 private:
  std::vector<Property> properties_;
};

/// Every check that applies to the document's kind.
VerifyReport verify_document(const std::string& label, const Document& doc, const VerifyOptions& options);

/// Seeded random batches exercising each module.
VerifyReport verify_random(const VerifyOptions& options);

/// Bundled documents first, in the given order, then the random batches.
VerifyReport verify_suite(const std::vector<std::pair<std::string, Document>>& docs, const VerifyOptions& options);

/// printf("%.17g")
std::string format_real(double x);

}  // namespace mixlab
