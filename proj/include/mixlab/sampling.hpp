#pragma once

#include <cstdint>
#include <random>

#include "mixlab/core.hpp"

namespace mixlab {

/// Random draws shared by every sampled lower bound. Entries are drawn in a
/// fixed order (size, then per entry a, c, g, sigma) so that two code paths
/// fed the same seed see the same families.
class FamilySampler {
 public:
  FamilySampler(std::uint64_t seed, int max_size, double log_sigma_range);

  int size();
  int index(int n);
  /// sign uniform on {-1, +1}, log|sigma| uniform on [-range, range].
  double sigma();
  double uniform(double lo, double hi);
  double normal();

  WeightedFamily family(const InstanceSizes& sizes);

 private:
  std::mt19937_64 rng_;
  int max_size_;
  double log_sigma_range_;
};

}  // namespace mixlab
