#include "lpm/geometry.hpp"

#include <algorithm>
#include <map>
#include <numeric>
#include <sstream>

#include "lpm/hull.hpp"
#include "lpm/kernels.hpp"
#include "lpm/linprog.hpp"

namespace lpm {

namespace {

// Chebyshev center: maximize r subject to <u_i, c> + r <= h_i.
std::pair<Vec, double> chebyshev_center(int dim, const Mat& normals, const Vec& offsets) {
  const int m = static_cast<int>(offsets.size());
  const double cap = 10.0 * (offsets.cwiseAbs().maxCoeff() + 1.0);
  Mat a(m + 1, dim + 1);
  Vec b(m + 1);
  a.topLeftCorner(m, dim) = normals.transpose();
  a.col(dim).head(m).setOnes();
  b.head(m) = offsets;
  a.row(m).setZero();
  a(m, dim) = 1.0;
  b[m] = cap;
  Vec c = Vec::Zero(dim + 1);
  c[dim] = 1.0;
  const LpResult res = maximize(c, a, b);
  if (res.status == LpResult::Status::Infeasible) throw GeometryError("halfspace intersection is empty");
  if (!res.optimal()) throw GeometryError("halfspace intersection is unbounded");
  return {res.x.head(dim), res.x[dim]};
}

int dedupe_vertex(Mat& verts, int& count, const Vec& x, double tol) {
  for (int k = 0; k < count; ++k)
    if ((verts.col(k) - x).norm() <= tol) return k;
  verts.col(count) = x;
  return count++;
}

}  // namespace

Body wulff_shape(int dim, const Mat& normals, const Vec& offsets) {
  if (dim != 2 && dim != 3) throw InvalidArgument("wulff_shape supports n = 2 and n = 3 only");
  const int m = static_cast<int>(offsets.size());
  if (normals.rows() != dim || normals.cols() != m) throw InvalidArgument("normals and offsets disagree in size");
  for (int i = 0; i < m; ++i)
    if (std::abs(normals.col(i).norm() - 1.0) > 1e-9) throw InvalidArgument("normals must be unit vectors");
  if (m < dim + 1) throw GeometryError("halfspace intersection is unbounded (too few normals)");

  auto [center, radius] = chebyshev_center(dim, normals, offsets);
  const double scale = std::max(1.0, offsets.cwiseAbs().maxCoeff() + center.norm());
  if (radius <= 1e-12 * scale) throw GeometryError("halfspace intersection has empty interior");

  Vec slack = offsets - normals.transpose() * center;
  Mat dual(dim, m);
  for (int i = 0; i < m; ++i) dual.col(i) = normals.col(i) / slack[i];

  ConvexHull hull;
  try {
    hull = convex_hull(dual);
  } catch (const GeometryError&) {
    throw GeometryError("halfspace intersection is unbounded (normals do not span)");
  }
  double dual_scale = 0.0;
  for (int i = 0; i < m; ++i) dual_scale = std::max(dual_scale, dual.col(i).norm());
  for (const auto& f : hull.facets)
    if (f.offset <= 1e-10 * dual_scale) throw GeometryError("halfspace intersection is unbounded");

  Body body;
  body.dim_ = dim;
  body.normals_ = normals;
  body.offsets_ = offsets;
  body.interior_point_ = center;
  body.chebyshev_radius_ = radius;

  // One primal vertex per dual hull facet.
  const int nf = static_cast<int>(hull.facets.size());
  Mat verts(dim, nf);
  int nv = 0;
  std::vector<int> face_vertex(nf);
  const double vtol = 1e-10 * scale;
  for (int f = 0; f < nf; ++f) {
    const Vec x = center + hull.facets[f].normal / hull.facets[f].offset;
    face_vertex[f] = dedupe_vertex(verts, nv, x, vtol);
  }
  body.vertices_ = verts.leftCols(nv);

  body.facet_areas_ = Vec::Zero(m);
  body.facet_vertices_.assign(m, {});
  Vec weighted_sum = Vec::Zero(dim);
  double volume = 0.0;

  if (dim == 2) {
    // Hull edge (a, b) in counter-clockwise order is the vertex shared by facets a and b.
    for (int f = 0; f < nf; ++f) {
      const int a = hull.facets[f].v[0], b = hull.facets[f].v[1];
      body.adjacency_.push_back({a, b, 1.0});
    }
    for (int f = 0; f < nf; ++f) {
      // Facet b lies between edge f (ending at b) and edge f+1 (starting at b).
      const int b = hull.facets[f].v[1];
      const int v0 = face_vertex[f], v1 = face_vertex[(f + 1) % nf];
      body.facet_vertices_[b] = {v0, v1};
      const double len = (body.vertices_.col(v1) - body.vertices_.col(v0)).norm();
      body.facet_areas_[b] = len;
      const double tri = 0.5 * len * slack[b];
      volume += tri;
      weighted_sum += tri * (center + body.vertices_.col(v0) + body.vertices_.col(v1)) / 3.0;
    }
  } else {
    std::vector<std::vector<int>> incident(m);
    std::map<std::pair<int, int>, std::vector<int>> edge_faces;
    for (int f = 0; f < nf; ++f) {
      const auto& v = hull.facets[f].v;
      for (int k = 0; k < 3; ++k) {
        incident[v[k]].push_back(face_vertex[f]);
        const int a = v[k], b = v[(k + 1) % 3];
        edge_faces[{std::min(a, b), std::max(a, b)}].push_back(f);
      }
    }
    for (const auto& [e, fs] : edge_faces) {
      if (fs.size() != 2) throw GeometryError("dual hull is not a closed surface");
      const double len = (body.vertices_.col(face_vertex[fs[0]]) - body.vertices_.col(face_vertex[fs[1]])).norm();
      if (len > 0.0) body.adjacency_.push_back({e.first, e.second, len});
    }
    for (int i = 0; i < m; ++i) {
      auto& ids = incident[i];
      if (ids.empty()) continue;
      std::sort(ids.begin(), ids.end());
      ids.erase(std::unique(ids.begin(), ids.end()), ids.end());
      const Eigen::Vector3d u(normals(0, i), normals(1, i), normals(2, i));
      Eigen::Vector3d e1 = std::abs(u.x()) < 0.9 ? Eigen::Vector3d::UnitX() : Eigen::Vector3d::UnitY();
      e1 = (e1 - e1.dot(u) * u).normalized();
      const Eigen::Vector3d e2 = u.cross(e1);
      Eigen::Vector3d mid = Eigen::Vector3d::Zero();
      for (int id : ids) mid += body.vertices_.col(id).head<3>();
      mid /= static_cast<double>(ids.size());
      std::vector<std::pair<double, int>> by_angle;
      for (int id : ids) {
        const Eigen::Vector3d d = body.vertices_.col(id).head<3>() - mid;
        by_angle.emplace_back(std::atan2(d.dot(e2), d.dot(e1)), id);
      }
      std::sort(by_angle.begin(), by_angle.end());
      std::vector<int> poly;
      for (auto& [ang, id] : by_angle) poly.push_back(id);
      double area = 0.0;
      const Eigen::Vector3d x0 = body.vertices_.col(poly[0]).head<3>();
      for (std::size_t k = 1; k + 1 < poly.size(); ++k) {
        const Eigen::Vector3d x1 = body.vertices_.col(poly[k]).head<3>();
        const Eigen::Vector3d x2 = body.vertices_.col(poly[k + 1]).head<3>();
        const double tri = 0.5 * (x1 - x0).cross(x2 - x0).dot(u);
        area += tri;
        const double tet = tri * slack[i] / 3.0;
        volume += tet;
        weighted_sum += tet * (center + body.vertices_.col(poly[0]) + body.vertices_.col(poly[k]) +
                               body.vertices_.col(poly[k + 1])) / 4.0;
      }
      body.facet_areas_[i] = std::max(0.0, area);
      body.facet_vertices_[i] = std::move(poly);
    }
  }

  if (volume <= 0.0) throw GeometryError("halfspace intersection has empty interior");
  body.volume_ = volume;
  body.centroid_ = weighted_sum / volume;

  kernels::support_values(body.vertices_, normals, body.support_values_);
  body.support_values_ = body.support_values_.cwiseMin(offsets);
  return body;
}

double support(const Body& body, const Vec& u) { return (body.vertices().transpose() * u).maxCoeff(); }

Vec support(const Body& body, const Mat& directions) {
  Vec out;
  kernels::support_values(body.vertices(), directions, out);
  return out;
}

AtomicMeasure surface_area_measure(const Body& body) {
  return AtomicMeasure{body.dim(), body.normals(), body.facet_areas()};
}

AtomicMeasure lp_surface_area_measure(const Body& body, double p) {
  if (!(p < 1.0)) throw InvalidArgument("L_p surface area measure requires p < 1");
  const Vec& h = body.support_values();
  Vec mass(h.size());
  for (Eigen::Index i = 0; i < h.size(); ++i) {
    const double area = body.facet_areas()[i];
    if (area == 0.0) {
      mass[i] = 0.0;
      continue;
    }
    if (h[i] < -1e-10) throw GeometryError("origin lies outside the body");
    mass[i] = h[i] <= 0.0 ? 0.0 : std::pow(h[i], 1.0 - p) * area;
  }
  return AtomicMeasure{body.dim(), body.normals(), std::move(mass)};
}

BodyStats body_stats(const Body& body) {
  BodyStats s;
  s.volume = body.volume();
  s.centroid = body.centroid();
  double rho = std::numeric_limits<double>::infinity();
  for (int i = 0; i < body.num_normals(); ++i)
    if (body.active(i)) rho = std::min(rho, body.support_values()[i] - body.normals().col(i).dot(s.centroid));
  s.inradius = rho;
  double r = 0.0;
  for (Eigen::Index k = 0; k < body.vertices().cols(); ++k)
    r = std::max(r, (body.vertices().col(k) - s.centroid).norm());
  s.circumradius = r;
  const int n = body.dim();
  s.volume_bound = (n + 1) * ball_volume(n - 1) * s.inradius * std::pow(s.circumradius, n - 1);
  s.volume_bound_holds = s.volume <= s.volume_bound * (1.0 + 1e-12);
  return s;
}

bool contains(const Body& body, const Vec& x, double tol) {
  for (int i = 0; i < body.num_normals(); ++i)
    if (body.normals().col(i).dot(x) > body.support_values()[i] + tol) return false;
  return true;
}

Body translate(const Body& body, const Vec& t) {
  return wulff_shape(body.dim(), body.normals(), body.offsets() + body.normals().transpose() * t);
}

Body scale(const Body& body, double s) {
  if (!(s > 0.0)) throw InvalidArgument("scale factor must be positive");
  return wulff_shape(body.dim(), body.normals(), s * body.offsets());
}

Mat area_jacobian(const Body& body, bool cyclic) {
  const int m = body.num_normals();
  Mat j = Mat::Zero(m, m);
  const Mat& u = body.normals();
  std::vector<FacetAdjacency> chain;
  if (cyclic && body.dim() == 2) {
    std::vector<int> order(m);
    std::iota(order.begin(), order.end(), 0);
    std::vector<double> ang(m);
    for (int i = 0; i < m; ++i) ang[i] = std::atan2(u(1, i), u(0, i));
    std::sort(order.begin(), order.end(), [&](int a, int b) { return ang[a] < ang[b]; });
    for (int k = 0; k < m; ++k) chain.push_back({order[k], order[(k + 1) % m], 1.0});
  }
  for (const auto& adj : chain.empty() ? body.adjacency() : chain) {
    const double c = std::clamp(u.col(adj.i).dot(u.col(adj.j)), -1.0, 1.0);
    const double s = std::sqrt(std::max(0.0, 1.0 - c * c));
    if (s < 1e-14) continue;
    j(adj.i, adj.j) += adj.measure / s;
    j(adj.j, adj.i) += adj.measure / s;
    j(adj.i, adj.i) -= adj.measure * c / s;
    j(adj.j, adj.j) -= adj.measure * c / s;
  }
  return j;
}

std::string to_off(const Body& body) {
  if (body.dim() != 3) throw InvalidArgument("OFF export requires n = 3");
  std::ostringstream os;
  os.precision(17);
  int nfaces = 0;
  for (int i = 0; i < body.num_normals(); ++i)
    if (body.facet_vertices()[i].size() >= 3) ++nfaces;
  os << "OFF\n" << body.vertices().cols() << ' ' << nfaces << " 0\n";
  for (Eigen::Index k = 0; k < body.vertices().cols(); ++k)
    os << body.vertices()(0, k) << ' ' << body.vertices()(1, k) << ' ' << body.vertices()(2, k) << '\n';
  for (int i = 0; i < body.num_normals(); ++i) {
    const auto& poly = body.facet_vertices()[i];
    if (poly.size() < 3) continue;
    os << poly.size();
    for (int v : poly) os << ' ' << v;
    os << '\n';
  }
  return os.str();
}

}  // namespace lpm
