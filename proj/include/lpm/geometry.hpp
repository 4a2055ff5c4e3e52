#pragma once

#include <string>
#include <vector>

#include "lpm/types.hpp"

namespace lpm {

/// Two active facets meeting along a common face of codimension two:
/// a vertex for n = 2 (measure 1), an edge for n = 3 (measure = edge length).
struct FacetAdjacency {
  int i = 0, j = 0;
  double measure = 0.0;
};

/// A convex body given as the Wulff shape {x : <x, u_i> <= h_i}.
///
/// All derived quantities are computed once by wulff_shape(); a Body is
/// immutable afterwards. Facet data is indexed like the input normals; a
/// constraint that does not touch the body has area 0 and support value
/// below its offset.
class Body {
 public:
  int dim() const { return dim_; }
  int num_normals() const { return static_cast<int>(offsets_.size()); }
  const Mat& normals() const { return normals_; }
  const Vec& offsets() const { return offsets_; }
  const Mat& vertices() const { return vertices_; }
  const Vec& facet_areas() const { return facet_areas_; }
  const Vec& support_values() const { return support_values_; }
  double volume() const { return volume_; }
  const Vec& centroid() const { return centroid_; }
  /// Chebyshev center used for the polar construction.
  const Vec& interior_point() const { return interior_point_; }
  double chebyshev_radius() const { return chebyshev_radius_; }
  const std::vector<FacetAdjacency>& adjacency() const { return adjacency_; }
  /// Vertex indices of each facet polygon, counter-clockwise seen from outside
  /// (n = 3) or the two endpoints (n = 2). Empty for inactive constraints.
  const std::vector<std::vector<int>>& facet_vertices() const { return facet_vertices_; }
  bool active(int i) const { return !facet_vertices_[i].empty(); }

 private:
  friend Body wulff_shape(int, const Mat&, const Vec&);
  Body() = default;

  int dim_ = 0;
  Mat normals_;
  Vec offsets_;
  Mat vertices_;
  Vec facet_areas_;
  Vec support_values_;
  double volume_ = 0.0;
  Vec centroid_;
  Vec interior_point_;
  double chebyshev_radius_ = 0.0;
  std::vector<FacetAdjacency> adjacency_;
  std::vector<std::vector<int>> facet_vertices_;
};

/// Halfspace intersection {x : <x, normals.col(i)> <= offsets[i]} for n in {2, 3}.
///
/// Vertices are enumerated by polarity: translate to the Chebyshev center,
/// take the convex hull of the points u_i / (h_i - <u_i, c>), and map hull
/// facets back to vertices. Throws GeometryError for unbounded sets, empty
/// interiors and numerically degenerate input.
Body wulff_shape(int dim, const Mat& normals, const Vec& offsets);

/// h_K(u) = max over vertices of <x, u>.
double support(const Body& body, const Vec& u);
/// Support values for many directions at once (columns of `directions`).
Vec support(const Body& body, const Mat& directions);

/// Per-normal facet areas; zero entries are kept.
AtomicMeasure surface_area_measure(const Body& body);

/// mass_i = hbar_i^{1-p} * S_i. Requires p < 1 and the origin in the body.
AtomicMeasure lp_surface_area_measure(const Body& body, double p);

struct BodyStats {
  double volume = 0.0;
  Vec centroid;
  double inradius = 0.0;      // largest ball about the centroid
  double circumradius = 0.0;  // smallest ball about the centroid
  double volume_bound = 0.0;  // (n+1) kappa_{n-1} inradius circumradius^{n-1}
  bool volume_bound_holds = false;
};

BodyStats body_stats(const Body& body);

/// True when x satisfies every active constraint within tol.
bool contains(const Body& body, const Vec& x, double tol = 1e-9);

/// K + t, rebuilt from translated offsets.
Body translate(const Body& body, const Vec& t);
/// s K, rebuilt from scaled offsets (s > 0).
Body scale(const Body& body, double s);

/// Dense Jacobian dS_i / dh_j of facet areas with respect to offsets,
/// valid where the combinatorics is locally constant.
///
/// With cyclic = true (n = 2 only) every normal is treated as a facet between
/// its angular neighbours, inactive ones with zero length. This is the
/// one-sided derivative in the direction that revives inactive facets.
Mat area_jacobian(const Body& body, bool cyclic = false);

/// Polygon / polyhedron in OFF format (n = 3 only).
std::string to_off(const Body& body);

}  // namespace lpm
