#pragma once

#include <array>
#include <vector>

#include "lpm/types.hpp"

namespace lpm {

/// One boundary facet of a convex hull: a segment (n = 2, uses v[0], v[1]) or a
/// triangle (n = 3), with outward unit normal and offset so that
/// <normal, x> <= offset on the hull.
struct HullFacet {
  std::array<int, 3> v{-1, -1, -1};
  Vec normal;
  double offset = 0.0;
};

struct ConvexHull {
  int dim = 0;
  std::vector<HullFacet> facets;  // n = 2: counter-clockwise edge cycle
  std::vector<int> vertices;      // indices of input points on the hull
};

/// Convex hull of the columns of `pts` (dim 2 or 3). Points within
/// `rel_tol * scale` of the hull boundary are treated as interior, so
/// collinear / coplanar points never become hull vertices.
/// Throws GeometryError when the points do not span the ambient space.
ConvexHull convex_hull(const Mat& pts, double rel_tol = 1e-11);

}  // namespace lpm
