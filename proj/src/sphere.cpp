#include "lpm/sphere.hpp"

#include <algorithm>
#include <cstdint>
#include <unordered_map>

namespace lpm {

namespace {

// Bucketed point set for merging nearly-equal unit vectors.
class PointIndex {
 public:
  PointIndex(int dim, double cell) : dim_(dim), cell_(cell) {}

  int find(const Mat& pts, const Vec& x, double tol) const {
    const auto base = key_coords(x);
    int found = -1;
    visit_neighbours(base, 0, base, [&](const std::array<std::int64_t, 3>& k) {
      auto it = buckets_.find(hash(k));
      if (it == buckets_.end()) return;
      for (int idx : it->second) {
        if (found < 0 && (pts.col(idx) - x).norm() <= tol) found = idx;
      }
    });
    return found;
  }

  void insert(const Vec& x, int idx) { buckets_[hash(key_coords(x))].push_back(idx); }

 private:
  std::array<std::int64_t, 3> key_coords(const Vec& x) const {
    std::array<std::int64_t, 3> k{0, 0, 0};
    for (int d = 0; d < dim_; ++d) k[d] = static_cast<std::int64_t>(std::floor(x[d] / cell_));
    return k;
  }
  static std::uint64_t hash(const std::array<std::int64_t, 3>& k) {
    std::uint64_t h = 1469598103934665603ull;
    for (auto v : k) h = (h ^ static_cast<std::uint64_t>(v)) * 1099511628211ull;
    return h;
  }
  template <class F>
  void visit_neighbours(const std::array<std::int64_t, 3>& base, int d,
                        std::array<std::int64_t, 3> cur, F&& f) const {
    if (d == dim_) {
      f(cur);
      return;
    }
    for (int o = -1; o <= 1; ++o) {
      cur[d] = base[d] + o;
      visit_neighbours(base, d + 1, cur, f);
    }
  }

  int dim_;
  double cell_;
  std::unordered_map<std::uint64_t, std::vector<int>> buckets_;
};

bool same_matrix(const Mat& a, const Mat& b, double tol) { return (a - b).cwiseAbs().maxCoeff() <= tol; }

int find_matrix(const Group& g, const Mat& m, double tol) {
  for (std::size_t i = 0; i < g.size(); ++i)
    if (same_matrix(g[i], m, tol)) return static_cast<int>(i);
  return -1;
}

}  // namespace

double angle_between(const Vec& a, const Vec& b) {
  // atan2 form stays accurate for nearly parallel vectors.
  const double c = a.dot(b);
  const double s = (a - c * b).norm();
  return std::atan2(s, c);
}

void validate_group(const Group& group, int n, double tol) {
  if (group.empty()) throw InvalidArgument("symmetry group is empty");
  for (const auto& a : group) {
    if (a.rows() != n || a.cols() != n) throw InvalidArgument("group element has wrong shape");
    if (!same_matrix(a.transpose() * a, Mat::Identity(n, n), tol))
      throw InvalidArgument("group element is not orthogonal");
  }
  for (const auto& a : group)
    for (const auto& b : group)
      if (find_matrix(group, a * b, 1e3 * tol) < 0)
        throw InvalidArgument("symmetry group is not closed under composition");
}

Group close_group(const Group& generators, int n, double tol) {
  Group g{Mat::Identity(n, n)};
  for (const auto& a : generators)
    if (find_matrix(g, a, tol) < 0) g.push_back(a);
  for (std::size_t i = 0; i < g.size(); ++i) {
    for (std::size_t j = 0; j < g.size(); ++j) {
      Mat prod = g[i] * g[j];
      if (find_matrix(g, prod, 1e3 * tol) < 0) {
        g.push_back(prod);
        if (g.size() > 10000) throw InvalidArgument("generated group is not finite");
      }
    }
  }
  return g;
}

Group dihedral_group(int k) {
  if (k < 1) throw InvalidArgument("dihedral group order must be positive");
  const double a = 2.0 * std::numbers::pi / k;
  Mat rot(2, 2), refl(2, 2);
  rot << std::cos(a), -std::sin(a), std::sin(a), std::cos(a);
  refl << 1, 0, 0, -1;
  return close_group({rot, refl}, 2);
}

DirectionGrid::DirectionGrid(int dim, Mat nodes, Vec weights, Group group,
                             std::vector<std::vector<int>> perms)
    : dim_(dim), nodes_(std::move(nodes)), weights_(std::move(weights)),
      group_(std::move(group)), perms_(std::move(perms)) {
  if (nodes_.rows() != dim_ || nodes_.cols() != weights_.size())
    throw InvalidArgument("grid nodes and weights disagree in size");
}

int DirectionGrid::find(const Vec& u, double tol) const {
  int best = -1;
  double best_d = tol;
  for (int i = 0; i < size(); ++i) {
    const double d = (nodes_.col(i) - u).norm();
    if (d <= best_d) {
      best_d = d;
      best = i;
    }
  }
  return best;
}

double DirectionGrid::cap_weight(const Vec& v, double alpha) const {
  const Vec vn = v.normalized();
  double s = 0.0;
  for (int i = 0; i < size(); ++i)
    if (angle_between(nodes_.col(i), vn) <= alpha) s += weights_[i];
  return s;
}

std::pair<double, double> DirectionGrid::nearest_neighbor_angles() const {
  double lo = std::numbers::pi, hi = 0.0;
  for (int i = 0; i < size(); ++i) {
    double best = std::numbers::pi;
    for (int j = 0; j < size(); ++j) {
      if (i == j) continue;
      best = std::min(best, angle_between(nodes_.col(i), nodes_.col(j)));
    }
    lo = std::min(lo, best);
    hi = std::max(hi, best);
  }
  return {lo, hi};
}

int default_resolution(int n) { return n == 2 ? 256 : 500; }

DirectionGrid build_grid(int n, int resolution, const std::optional<Group>& symmetry) {
  if (n != 2 && n != 3) throw InvalidArgument("direction grids support n = 2 and n = 3 only");
  if (resolution < 4) throw InvalidArgument("grid resolution must be at least 4");

  Mat base(n, resolution);
  if (n == 2) {
    for (int k = 0; k < resolution; ++k) {
      const double t = 2.0 * std::numbers::pi * k / resolution;
      base(0, k) = std::cos(t);
      base(1, k) = std::sin(t);
    }
  } else {
    const double golden = std::numbers::pi * (3.0 - std::sqrt(5.0));
    for (int k = 0; k < resolution; ++k) {
      const double z = 1.0 - (2.0 * k + 1.0) / resolution;
      const double r = std::sqrt(std::max(0.0, 1.0 - z * z));
      const double t = golden * k;
      base(0, k) = r * std::cos(t);
      base(1, k) = r * std::sin(t);
      base(2, k) = z;
    }
  }

  if (!symmetry) {
    Vec w = Vec::Constant(resolution, sphere_area(n) / resolution);
    return DirectionGrid(n, std::move(base), std::move(w));
  }

  const Group& g = *symmetry;
  validate_group(g, n);

  // Orbit closure with merging at the angular tolerance.
  constexpr double merge_tol = 1e-9;
  std::vector<Vec> pts;
  Mat store(n, resolution * static_cast<int>(g.size()));
  PointIndex index(n, 1e-6);
  int count = 0;
  auto add = [&](const Vec& x) {
    if (index.find(store, x, merge_tol) >= 0) return;
    store.col(count) = x;
    index.insert(x, count);
    ++count;
  };
  for (int k = 0; k < resolution; ++k) {
    const Vec u = base.col(k);
    for (const auto& a : g) add((a * u).normalized());
  }
  Mat nodes = store.leftCols(count);

  std::vector<std::vector<int>> perms(g.size(), std::vector<int>(count));
  for (std::size_t e = 0; e < g.size(); ++e) {
    for (int i = 0; i < count; ++i) {
      const int j = index.find(store, g[e] * nodes.col(i), 1e-8);
      if (j < 0) throw InvalidArgument("orbit closure failed: group does not preserve node set");
      perms[e][i] = j;
    }
  }
  Vec w = Vec::Constant(count, sphere_area(n) / count);
  return DirectionGrid(n, std::move(nodes), std::move(w), g, std::move(perms));
}

}  // namespace lpm
