#include "mixlab/simplex_search.hpp"

#include <algorithm>
#include <numeric>

namespace mixlab {

namespace {

double binomial(int n, int k) {
  double out = 1.0;
  for (int i = 1; i <= k; ++i) out = out * (n - k + i) / i;
  return out;
}

void compositions(int n, int left, std::vector<int>& parts, int pos, std::vector<std::vector<int>>& out) {
  if (pos == n - 1) {
    parts[pos] = left;
    out.push_back(parts);
    return;
  }
  for (int k = left; k >= 0; --k) {
    parts[pos] = k;
    compositions(n, left - k, parts, pos + 1, out);
  }
}

Vector project(const Vector& x) {
  Vector p = x.cwiseMax(0.0);
  const double total = p.sum();
  if (!(total > 0.0)) return Vector::Constant(x.size(), 1.0 / static_cast<double>(x.size()));
  return p / total;
}

class Tracker {
 public:
  explicit Tracker(const std::function<double(const Vector&)>& f) : f_(f) {}

  double operator()(const Vector& x) {
    ++evaluations;
    const double v = f_(x);
    if (v > best_value || best_point.size() == 0) {
      best_value = v;
      best_point = x;
    }
    return v;
  }

  int evaluations = 0;
  double best_value = -kInfinity;
  Vector best_point;

 private:
  const std::function<double(const Vector&)>& f_;
};

/// Moves mass between pairs of coordinates while that improves f, at radii
/// h, h/2, ..., h/2^levels.
void pairwise_refine(Tracker& eval, Vector x, double fx, double h, int levels) {
  const Index n = x.size();
  for (int level = 0; level <= levels; ++level, h *= 0.5) {
    bool improved = true;
    for (int sweep = 0; improved && sweep < 4 * static_cast<int>(n); ++sweep) {
      improved = false;
      for (Index i = 0; i < n; ++i) {
        for (Index j = 0; j < n; ++j) {
          if (i == j || x(j) <= 0.0) continue;
          Vector y = x;
          const double step = std::min(h, x(j));
          y(i) += step;
          y(j) -= step;
          const double fy = eval(y);
          if (fy > fx) {
            x = y;
            fx = fy;
            improved = true;
          }
        }
      }
    }
  }
}

/// Nelder-Mead on the first n-1 coordinates, the last one being implied,
/// with every trial point projected back onto the simplex.
void nelder_mead(Tracker& eval, const Vector& start, double scale, int iterations) {
  const Index n = start.size();
  const Index dim = n - 1;
  auto lift = [&](const Vector& y) {
    Vector x(n);
    x.head(dim) = y;
    x(dim) = 1.0 - y.sum();
    return project(x);
  };
  auto cost = [&](const Vector& y) { return -eval(lift(y)); };

  std::vector<Vector> pts;
  std::vector<double> vals;
  pts.push_back(start.head(dim));
  for (Index i = 0; i < dim; ++i) {
    Vector y = start.head(dim);
    y(i) += scale;
    pts.push_back(y);
  }
  for (const auto& p : pts) vals.push_back(cost(p));

  std::vector<std::size_t> order(pts.size());
  for (int it = 0; it < iterations; ++it) {
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return vals[a] < vals[b]; });
    const std::size_t best = order.front();
    const std::size_t worst = order.back();
    const std::size_t second = order[order.size() - 2];
    if (std::abs(vals[worst] - vals[best]) <= 1e-15 * (1.0 + std::abs(vals[best]))) break;

    Vector centroid = Vector::Zero(dim);
    for (std::size_t k = 0; k + 1 < order.size(); ++k) centroid += pts[order[k]];
    centroid /= static_cast<double>(dim);

    const Vector reflected = centroid + (centroid - pts[worst]);
    const double fr = cost(reflected);
    if (fr < vals[best]) {
      const Vector expanded = centroid + 2.0 * (centroid - pts[worst]);
      const double fe = cost(expanded);
      if (fe < fr) {
        pts[worst] = expanded;
        vals[worst] = fe;
      } else {
        pts[worst] = reflected;
        vals[worst] = fr;
      }
    } else if (fr < vals[second]) {
      pts[worst] = reflected;
      vals[worst] = fr;
    } else {
      const Vector contracted = centroid + 0.5 * (pts[worst] - centroid);
      const double fc = cost(contracted);
      if (fc < vals[worst]) {
        pts[worst] = contracted;
        vals[worst] = fc;
      } else {
        for (std::size_t k = 0; k < pts.size(); ++k) {
          if (k == best) continue;
          pts[k] = pts[best] + 0.5 * (pts[k] - pts[best]);
          vals[k] = cost(pts[k]);
        }
      }
    }
  }
}

}  // namespace

std::vector<Vector> simplex_lattice(int n, int resolution) {
  if (n < 1 || resolution < 1) throw Error(ErrorKind::parameter, "lattice needs n >= 1 and resolution >= 1");
  std::vector<std::vector<int>> raw;
  std::vector<int> parts(static_cast<std::size_t>(n), 0);
  compositions(n, resolution, parts, 0, raw);
  std::vector<Vector> out;
  out.reserve(raw.size());
  for (const auto& k : raw) {
    Vector x(n);
    for (int i = 0; i < n; ++i) x(i) = static_cast<double>(k[static_cast<std::size_t>(i)]) / resolution;
    out.push_back(x);
  }
  return out;
}

SimplexSearchResult maximize_on_simplex(int n, const std::function<double(const Vector&)>& f,
                                        const SimplexSearchOptions& options) {
  if (n < 1) throw Error(ErrorKind::parameter, "simplex dimension must be at least 1");
  if (options.grid_depth < 1) throw Error(ErrorKind::parameter, "grid depth must be at least 1");
  Tracker eval(f);
  if (n == 1) {
    eval(Vector::Ones(1));
    return {eval.best_point, eval.best_value, eval.evaluations};
  }

  int resolution = 1;
  while (resolution < options.grid_depth &&
         binomial(resolution + 1 + n - 1, n - 1) <= options.max_lattice_points) {
    ++resolution;
  }
  const auto lattice = simplex_lattice(n, resolution);
  std::vector<double> values;
  values.reserve(lattice.size());
  for (const auto& x : lattice) values.push_back(eval(x));

  std::vector<std::size_t> order(lattice.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return values[a] > values[b]; });
  const std::size_t starts = std::min<std::size_t>(static_cast<std::size_t>(std::max(options.starts, 1)), order.size());
  const double h = 1.0 / resolution;
  for (std::size_t k = 0; k < starts; ++k) {
    pairwise_refine(eval, lattice[order[k]], values[order[k]], 0.5 * h, options.grid_depth);
  }
  nelder_mead(eval, eval.best_point, h * std::pow(0.5, options.grid_depth), options.nelder_mead_iterations);
  return {eval.best_point, eval.best_value, eval.evaluations};
}

}  // namespace mixlab
