#pragma once

#include <functional>

#include "mixlab/core.hpp"

namespace mixlab {

struct SimplexSearchOptions {
  int grid_depth = 8;
  /// Upper bound on the number of lattice points evaluated up front.
  int max_lattice_points = 512;
  /// Best lattice points carried into local refinement.
  int starts = 3;
  int nelder_mead_iterations = 200;
};

struct SimplexSearchResult {
  Vector point;
  double value = 0.0;
  int evaluations = 0;
};

/// Deterministic maximization of f over the probability simplex in R^n:
/// a uniform lattice of resolution at most grid_depth, then pairwise
/// mass-transfer moves at radii halving grid_depth times, then a projected
/// Nelder-Mead polish. No concavity is assumed; the result is the best
/// point seen.
SimplexSearchResult maximize_on_simplex(int n, const std::function<double(const Vector&)>& f,
                                        const SimplexSearchOptions& options = {});

/// Every point k / N with k a composition of N into n nonnegative parts, in
/// lexicographic order of k.
std::vector<Vector> simplex_lattice(int n, int resolution);

}  // namespace mixlab
