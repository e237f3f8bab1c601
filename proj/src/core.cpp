#include "mixlab/core.hpp"

#include <string>

namespace mixlab {

const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::index: return "index";
    case ErrorKind::parameter: return "parameter";
    case ErrorKind::solver_failure: return "solver-failure";
    case ErrorKind::not_summable: return "not-summable";
    case ErrorKind::not_mixing: return "not-mixing";
    case ErrorKind::degenerate: return "degenerate";
    case ErrorKind::optimization: return "optimization";
    case ErrorKind::empty_witness: return "empty-witness";
    case ErrorKind::model: return "model";
    case ErrorKind::precondition: return "precondition";
    case ErrorKind::parse: return "parse";
    case ErrorKind::schema: return "schema";
    case ErrorKind::invariant: return "invariant";
  }
  return "unknown";
}

void validate_positive(double value, const char* name) {
  if (!(value > 0.0) || !std::isfinite(value)) {
    throw Error(ErrorKind::parameter,
                std::string(name) + " must be a positive finite real, got " + std::to_string(value));
  }
}

ExponentParams ExponentParams::make(double p, double q, double s) {
  validate_positive(p, "p");
  validate_positive(q, "q");
  validate_positive(s, "s");
  if (q > s) {
    throw Error(ErrorKind::parameter, "exponents must satisfy q <= s (q=" + std::to_string(q) +
                                          ", s=" + std::to_string(s) + ")");
  }
  return ExponentParams{p, q, s};
}

Instance::Instance(InstanceSizes sizes, Vector q, Matrix h, Matrix m)
    : sizes_(sizes), q_(std::move(q)), h_(std::move(h)), m_(std::move(m)) {
  if (sizes_.a < 1 || sizes_.c < 1 || sizes_.g < 1 || sizes_.k < 1 || sizes_.w < 1) {
    throw Error(ErrorKind::parameter, "instance sizes must be positive");
  }
  const Index n = sizes_.probes();
  if (q_.size() != n) throw Error(ErrorKind::parameter, "Q has wrong length");
  if (h_.rows() != n || h_.cols() != sizes_.k) throw Error(ErrorKind::parameter, "H has wrong shape");
  if (m_.rows() != n || m_.cols() != sizes_.w) throw Error(ErrorKind::parameter, "M has wrong shape");
  if (!q_.allFinite()) throw Error(ErrorKind::invariant, "Q has non-finite entries");
  if (!h_.allFinite()) throw Error(ErrorKind::invariant, "H has non-finite entries");
  if (!m_.allFinite()) throw Error(ErrorKind::invariant, "M has non-finite entries");
}

int Instance::probe(int a, int c, int g) const {
  if (a < 0 || a >= sizes_.a || c < 0 || c >= sizes_.c || g < 0 || g >= sizes_.g) {
    throw Error(ErrorKind::index, "probe index (" + std::to_string(a) + "," + std::to_string(c) +
                                      "," + std::to_string(g) + ") out of range");
  }
  return (a * sizes_.c + c) * sizes_.g + g;
}

std::array<int, 3> Instance::unflatten(int probe) const {
  if (probe < 0 || probe >= probe_count()) throw Error(ErrorKind::index, "probe out of range");
  const int g = probe % sizes_.g;
  const int ac = probe / sizes_.g;
  return {ac / sizes_.c, ac % sizes_.c, g};
}

namespace {

bool same(const Matrix& x, const Matrix& y) {
  return x.rows() == y.rows() && x.cols() == y.cols() && x == y;
}

}  // namespace

bool operator==(const Instance& lhs, const Instance& rhs) {
  return lhs.sizes_ == rhs.sizes_ && lhs.q_.size() == rhs.q_.size() && lhs.q_ == rhs.q_ &&
         same(lhs.h_, rhs.h_) && same(lhs.m_, rhs.m_);
}

WeightedFamily::WeightedFamily(std::vector<FamilyEntry> entries) : entries_(std::move(entries)) {
  if (entries_.empty()) throw Error(ErrorKind::parameter, "a family needs at least one entry");
  for (const auto& e : entries_) {
    if (e.sigma == 0.0 || !std::isfinite(e.sigma)) {
      throw Error(ErrorKind::parameter, "family weights must be nonzero finite reals");
    }
  }
}

Vector WeightedFamily::sigma() const {
  Vector out(size());
  for (int j = 0; j < size(); ++j) out(j) = entries_[j].sigma;
  return out;
}

std::vector<int> WeightedFamily::probes(const Instance& inst) const {
  std::vector<int> out;
  out.reserve(entries_.size());
  for (const auto& e : entries_) out.push_back(inst.probe(e.a, e.c, e.g));
  return out;
}

SimplexMeasure::SimplexMeasure(Vector weights) : weights_(std::move(weights)) {
  if (weights_.size() == 0) throw Error(ErrorKind::parameter, "measure on an empty set");
  if (!weights_.allFinite() || weights_.minCoeff() < 0.0) {
    throw Error(ErrorKind::parameter, "measure weights must be finite and nonnegative");
  }
  if (std::abs(pairwise_sum(weights_) - 1.0) > kSumTolerance) {
    throw Error(ErrorKind::parameter, "measure weights must sum to 1");
  }
}

SimplexMeasure SimplexMeasure::dirac(int index, int n) {
  if (n < 1 || index < 0 || index >= n) throw Error(ErrorKind::index, "dirac index out of range");
  Vector w = Vector::Zero(n);
  w(index) = 1.0;
  return SimplexMeasure(std::move(w));
}

SimplexMeasure SimplexMeasure::uniform(int n) {
  if (n < 1) throw Error(ErrorKind::parameter, "measure on an empty set");
  return SimplexMeasure(Vector::Constant(n, 1.0 / n));
}

SimplexMeasure SimplexMeasure::normalized(const Vector& raw) {
  Vector w = raw.cwiseMax(0.0);
  const double total = pairwise_sum(w);
  if (!(total > 0.0)) return uniform(static_cast<int>(raw.size()));
  w /= total;
  return SimplexMeasure(std::move(w));
}

Matrix gather_rows(const Matrix& source, const std::vector<int>& rows) {
  Matrix out(static_cast<Index>(rows.size()), source.cols());
  for (std::size_t j = 0; j < rows.size(); ++j) out.row(static_cast<Index>(j)) = source.row(rows[j]);
  return out;
}

double strong_sum(const Instance& inst, const WeightedFamily& fam, double p) {
  validate_positive(p, "p");
  const auto rows = fam.probes(inst);
  Vector values(static_cast<Index>(rows.size()));
  for (std::size_t j = 0; j < rows.size(); ++j) values(static_cast<Index>(j)) = inst.q()(rows[j]);
  return weighted_lp(fam.sigma(), values, p);
}

double weak_sup(const Instance& inst, const WeightedFamily& fam, double p, Side side) {
  validate_positive(p, "p");
  const auto rows = fam.probes(inst);
  const Matrix kernel = gather_rows(side == Side::k ? inst.h() : inst.m(), rows);
  return weighted_lp_sup(fam.sigma(), kernel, p);
}

}  // namespace mixlab
