#pragma once

#include <optional>
#include <vector>

#include "lpm/types.hpp"

namespace lpm {

/// A finite subgroup of O(n), stored as its full list of elements.
using Group = std::vector<Mat>;

/// Checks orthogonality and closure of `group`; throws InvalidArgument otherwise.
void validate_group(const Group& group, int n, double tol = 1e-9);

/// Smallest group containing `generators` (closure under products).
Group close_group(const Group& generators, int n, double tol = 1e-9);

/// Dihedral group of order 2k acting on R^2 (rotations by 2*pi/k and the reflection y -> -y).
Group dihedral_group(int k);

/// Quadrature nodes and weights on S^{n-1}, n in {2, 3}.
///
/// For n = 2 the nodes are equally spaced angles; for n = 3 a Fibonacci lattice.
/// Weights are equal and sum to the sphere area. When built with a symmetry
/// group the node set is a union of full orbits and `permutation(g)` maps node
/// indices through the g-th group element.
class DirectionGrid {
 public:
  DirectionGrid(int dim, Mat nodes, Vec weights, Group group = {},
                std::vector<std::vector<int>> perms = {});

  int dim() const { return dim_; }
  int size() const { return static_cast<int>(weights_.size()); }
  const Mat& nodes() const { return nodes_; }
  auto node(int i) const { return nodes_.col(i); }
  const Vec& weights() const { return weights_; }
  double weight(int i) const { return weights_[i]; }
  double total_weight() const { return weights_.sum(); }

  bool has_group() const { return !group_.empty(); }
  const Group& group() const { return group_; }
  /// perm[i] is the index of group()[g] * node(i).
  const std::vector<int>& permutation(int g) const { return perms_.at(g); }

  /// Index of the node equal to `u` within `tol` (Euclidean), or -1.
  int find(const Vec& u, double tol = 1e-9) const;

  /// Sum of weights of nodes within angle `alpha` of `v`.
  double cap_weight(const Vec& v, double alpha) const;

  /// Smallest and largest nearest-neighbour angle over the node set.
  std::pair<double, double> nearest_neighbor_angles() const;

 private:
  int dim_;
  Mat nodes_;
  Vec weights_;
  Group group_;
  std::vector<std::vector<int>> perms_;
};

/// Default resolution used by the solver for each dimension.
int default_resolution(int n);

DirectionGrid build_grid(int n, int resolution, const std::optional<Group>& symmetry = std::nullopt);

/// Angle between unit vectors, robust near 0 and pi.
double angle_between(const Vec& a, const Vec& b);

}  // namespace lpm
