#include "lpm/hull.hpp"

#include <algorithm>
#include <cstdint>
#include <numeric>
#include <unordered_map>

namespace lpm {

namespace {

double cross2(const Eigen::Vector2d& o, const Eigen::Vector2d& a, const Eigen::Vector2d& b) {
  return (a - o).x() * (b - o).y() - (a - o).y() * (b - o).x();
}

ConvexHull hull_2d(const Mat& pts, double rel_tol) {
  const int m = static_cast<int>(pts.cols());
  if (m < 3) throw GeometryError("need at least three points for a planar hull");
  double scale = 0.0;
  for (int i = 0; i < m; ++i) scale = std::max(scale, pts.col(i).norm());
  const double eps = rel_tol * scale;

  std::vector<int> order(m);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](int a, int b) {
    if (pts(0, a) != pts(0, b)) return pts(0, a) < pts(0, b);
    if (pts(1, a) != pts(1, b)) return pts(1, a) < pts(1, b);
    return a < b;
  });
  auto p = [&](int i) { return Eigen::Vector2d(pts(0, i), pts(1, i)); };
  // Distance of b from the line through a and c, signed by turn direction.
  auto turn = [&](int a, int b, int c) {
    const double base = (p(c) - p(a)).norm();
    return base > 0.0 ? cross2(p(a), p(b), p(c)) / base : 0.0;
  };

  // Andrew's monotone chain; strict turns only.
  std::vector<int> h(2 * m);
  int k = 0;
  for (int i = 0; i < m; ++i) {
    while (k >= 2 && turn(h[k - 2], h[k - 1], order[i]) <= eps) --k;
    h[k++] = order[i];
  }
  for (int i = m - 2, t = k + 1; i >= 0; --i) {
    while (k >= t && turn(h[k - 2], h[k - 1], order[i]) <= eps) --k;
    h[k++] = order[i];
  }
  h.resize(k - 1);
  if (h.size() < 3) throw GeometryError("planar hull is degenerate (collinear points)");

  ConvexHull hull;
  hull.dim = 2;
  hull.vertices = h;
  const int nv = static_cast<int>(h.size());
  for (int i = 0; i < nv; ++i) {
    const int a = h[i], b = h[(i + 1) % nv];
    const Eigen::Vector2d e = p(b) - p(a);
    HullFacet f;
    f.v = {a, b, -1};
    f.normal = Vec(2);
    f.normal << e.y(), -e.x();
    f.normal.normalize();
    f.offset = f.normal.dot(pts.col(a));
    hull.facets.push_back(std::move(f));
  }
  return hull;
}

struct Face3 {
  int a, b, c;
  Eigen::Vector3d n;
  double d;
  bool alive = true;
};

ConvexHull hull_3d(const Mat& pts, double rel_tol) {
  const int m = static_cast<int>(pts.cols());
  if (m < 4) throw GeometryError("need at least four points for a spatial hull");
  auto P = [&](int i) { return Eigen::Vector3d(pts(0, i), pts(1, i), pts(2, i)); };
  double scale = 0.0;
  for (int i = 0; i < m; ++i) scale = std::max(scale, pts.col(i).norm());
  const double eps = rel_tol * scale;

  // Initial tetrahedron from extreme points.
  int i0 = 0;
  for (int i = 1; i < m; ++i)
    if (pts(0, i) < pts(0, i0)) i0 = i;
  int i1 = -1;
  double best = 0.0;
  for (int i = 0; i < m; ++i) {
    const double dd = (P(i) - P(i0)).norm();
    if (dd > best) best = dd, i1 = i;
  }
  if (i1 < 0 || best <= eps) throw GeometryError("spatial hull is degenerate (coincident points)");
  const Eigen::Vector3d dir = (P(i1) - P(i0)).normalized();
  int i2 = -1;
  best = 0.0;
  for (int i = 0; i < m; ++i) {
    const Eigen::Vector3d v = P(i) - P(i0);
    const double dd = (v - v.dot(dir) * dir).norm();
    if (dd > best) best = dd, i2 = i;
  }
  if (i2 < 0 || best <= eps) throw GeometryError("spatial hull is degenerate (collinear points)");
  const Eigen::Vector3d pn = (P(i1) - P(i0)).cross(P(i2) - P(i0)).normalized();
  int i3 = -1;
  best = 0.0;
  for (int i = 0; i < m; ++i) {
    const double dd = std::abs(pn.dot(P(i) - P(i0)));
    if (dd > best) best = dd, i3 = i;
  }
  if (i3 < 0 || best <= eps) throw GeometryError("spatial hull is degenerate (coplanar points)");

  const Eigen::Vector3d inner = 0.25 * (P(i0) + P(i1) + P(i2) + P(i3));
  std::vector<Face3> faces;
  std::unordered_map<std::uint64_t, int> edge_face;
  auto key = [m](int a, int b) { return static_cast<std::uint64_t>(a) * static_cast<std::uint64_t>(m) + b; };

  auto make_face = [&](int a, int b, int c) {
    Face3 f{a, b, c, Eigen::Vector3d::Zero(), 0.0};
    f.n = (P(b) - P(a)).cross(P(c) - P(a));
    const double len = f.n.norm();
    if (len <= 0.0) throw GeometryError("spatial hull produced a zero-area face");
    f.n /= len;
    f.d = f.n.dot(P(a));
    return f;
  };
  auto add_face = [&](int a, int b, int c) {
    Face3 f = make_face(a, b, c);
    const int id = static_cast<int>(faces.size());
    for (auto [x, y] : {std::pair{a, b}, std::pair{b, c}, std::pair{c, a}}) {
      auto [it, fresh] = edge_face.emplace(key(x, y), id);
      if (!fresh) throw GeometryError("spatial hull lost manifold structure (numerically degenerate)");
    }
    faces.push_back(f);
  };
  auto oriented = [&](int a, int b, int c) {
    Face3 f = make_face(a, b, c);
    if (f.n.dot(inner) > f.d) std::swap(b, c);
    add_face(a, b, c);
  };
  oriented(i0, i1, i2);
  oriented(i0, i1, i3);
  oriented(i0, i2, i3);
  oriented(i1, i2, i3);

  std::vector<char> used(m, 0);
  used[i0] = used[i1] = used[i2] = used[i3] = 1;
  std::vector<int> visible;
  std::vector<std::pair<int, int>> horizon;
  for (int pi = 0; pi < m; ++pi) {
    if (used[pi]) continue;
    const Eigen::Vector3d p = P(pi);
    visible.clear();
    for (int f = 0; f < static_cast<int>(faces.size()); ++f)
      if (faces[f].alive && faces[f].n.dot(p) - faces[f].d > eps) visible.push_back(f);
    if (visible.empty()) continue;
    for (int f : visible) faces[f].alive = false;
    horizon.clear();
    for (int f : visible) {
      const Face3& F = faces[f];
      for (auto [x, y] : {std::pair{F.a, F.b}, std::pair{F.b, F.c}, std::pair{F.c, F.a}}) {
        auto it = edge_face.find(key(y, x));
        if (it == edge_face.end()) throw GeometryError("spatial hull lost manifold structure");
        if (faces[it->second].alive) horizon.emplace_back(x, y);
      }
    }
    for (int f : visible) {
      const Face3& F = faces[f];
      edge_face.erase(key(F.a, F.b));
      edge_face.erase(key(F.b, F.c));
      edge_face.erase(key(F.c, F.a));
    }
    for (auto [x, y] : horizon) add_face(x, y, pi);
    used[pi] = 1;
  }

  ConvexHull hull;
  hull.dim = 3;
  std::vector<char> on_hull(m, 0);
  for (const auto& f : faces) {
    if (!f.alive) continue;
    HullFacet hf;
    hf.v = {f.a, f.b, f.c};
    hf.normal = Vec(3);
    hf.normal << f.n.x(), f.n.y(), f.n.z();
    hf.offset = f.d;
    hull.facets.push_back(std::move(hf));
    on_hull[f.a] = on_hull[f.b] = on_hull[f.c] = 1;
  }
  for (int i = 0; i < m; ++i)
    if (on_hull[i]) hull.vertices.push_back(i);
  return hull;
}

}  // namespace

ConvexHull convex_hull(const Mat& pts, double rel_tol) {
  if (pts.rows() == 2) return hull_2d(pts, rel_tol);
  if (pts.rows() == 3) return hull_3d(pts, rel_tol);
  throw InvalidArgument("convex hull supports dimensions 2 and 3 only");
}

}  // namespace lpm
