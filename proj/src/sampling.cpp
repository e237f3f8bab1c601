#include "mixlab/sampling.hpp"

namespace mixlab {

FamilySampler::FamilySampler(std::uint64_t seed, int max_size, double log_sigma_range)
    : rng_(seed), max_size_(max_size), log_sigma_range_(log_sigma_range) {
  if (max_size_ < 1) throw Error(ErrorKind::parameter, "family size cap must be at least 1");
  if (!(log_sigma_range_ >= 0.0)) throw Error(ErrorKind::parameter, "log-sigma range must be nonnegative");
}

int FamilySampler::size() { return index(max_size_) + 1; }

int FamilySampler::index(int n) {
  std::uniform_int_distribution<int> pick(0, n - 1);
  return pick(rng_);
}

double FamilySampler::sigma() {
  const double sign = index(2) == 0 ? -1.0 : 1.0;
  return sign * std::exp(uniform(-log_sigma_range_, log_sigma_range_));
}

double FamilySampler::uniform(double lo, double hi) {
  if (lo == hi) return lo;
  std::uniform_real_distribution<double> u(lo, hi);
  return u(rng_);
}

double FamilySampler::normal() {
  std::normal_distribution<double> n(0.0, 1.0);
  return n(rng_);
}

WeightedFamily FamilySampler::family(const InstanceSizes& sizes) {
  const int m = size();
  std::vector<FamilyEntry> entries;
  entries.reserve(static_cast<std::size_t>(m));
  for (int j = 0; j < m; ++j) {
    FamilyEntry e;
    e.a = index(sizes.a);
    e.c = index(sizes.c);
    e.g = index(sizes.g);
    e.sigma = sigma();
    entries.push_back(e);
  }
  return WeightedFamily(std::move(entries));
}

}  // namespace mixlab
