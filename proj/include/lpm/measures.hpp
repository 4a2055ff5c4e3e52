#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "lpm/sphere.hpp"
#include "lpm/types.hpp"

namespace lpm {

using GridPtr = std::shared_ptr<const DirectionGrid>;
using Density = std::function<double(const Vec&)>;

/// Finite measure with atoms on the nodes of a DirectionGrid.
///
/// masses()[i] is the mass at grid node i (zero allowed). When the measure was
/// sampled from a density, density_bounds() holds (min f, max f). A measure
/// flagged invariant() is constant on the orbits of the grid's group.
class SphericalMeasure {
 public:
  SphericalMeasure(GridPtr grid, Vec masses,
                   std::optional<std::pair<double, double>> density_bounds = std::nullopt,
                   bool invariant = false);

  int dim() const { return grid_->dim(); }
  int size() const { return static_cast<int>(masses_.size()); }
  const DirectionGrid& grid() const { return *grid_; }
  const GridPtr& grid_ptr() const { return grid_; }
  const Vec& masses() const { return masses_; }
  double total() const { return masses_.sum(); }
  const std::optional<std::pair<double, double>>& density_bounds() const { return density_bounds_; }
  bool invariant() const { return invariant_; }

  /// Largest |mu(g u) - mu(u)| over group elements and nodes (0 without a group).
  double orbit_residual() const;

  /// Atoms as (direction, mass) pairs. With drop_zero, zero-mass nodes are omitted.
  AtomicMeasure to_atomic(bool drop_zero = false) const;

 private:
  GridPtr grid_;
  Vec masses_;
  std::optional<std::pair<double, double>> density_bounds_;
  bool invariant_ = false;
};

/// mu_a = f(u_a) w_a. Density bounds are recorded when min f > 0.
/// With invariant = true the grid must carry a group and f is orbit-averaged.
SphericalMeasure density_measure(const Density& f, GridPtr grid, bool invariant = false);

/// Clamp of f into [1/m, m].
Density truncate_density(Density f, int m);

struct SmoothingResult {
  SphericalMeasure measure;
  int cells = 0;                 // size of the net
  std::vector<int> centers;      // grid node index of each net point
  std::vector<int> cell_of;      // cell index of each grid node
  Vec cell_mass;                 // raw mass of mu falling in each cell
  Vec cell_area;                 // summed grid weights of each cell
};

/// Piecewise-constant density from a 1/m-net: each Dirichlet-Voronoi cell P
/// gets mu(P)/area(P) + 1/#cells^2. With invariant = true the net is built on
/// the orbit quotient and the cells are unions of orbits.
SmoothingResult smooth_discrete(const AtomicMeasure& mu, GridPtr grid, int m, bool invariant = false);

struct HemisphereSymmetrization {
  AtomicMeasure mu0;             // sum of A^i mu over i = 0..d
  Vec v0;
  Mat simplex;                   // columns v_0 .. v_d
  Mat rotation;                  // A with A v_i = v_{i+1}, identity on Ltilde
  Mat lin_basis;                 // orthonormal basis of L = lin supp mu
  Mat ltilde_basis;              // orthonormal basis of L cap v0^perp
  int d = 0;
  Mat cone_normals;              // D(v0) = {x : <x, c_j> <= 0 for every column c_j}
  Group group() const;           // {I, A, ..., A^d}
};

/// Requires pos supp mu != lin supp mu.
HemisphereSymmetrization symmetrize_hemisphere(const AtomicMeasure& mu);

struct SubspaceWitness {
  Mat basis;                     // orthonormal basis of the subspace
  int dim = 0;
  double mass = 0.0;
  double ratio = 0.0;            // mass / total
  bool equality = false;
  bool complement = false;       // rest of the support lies in a complementary subspace
};

struct SubspaceReport {
  bool satisfied = true;
  bool equality = false;         // some subspace attains dim L / n
  double worst_excess = 0.0;     // max over subspaces of ratio - dim/n
  std::vector<SubspaceWitness> witnesses;  // violations and equality cases
};

SubspaceReport subspace_concentration_check(const AtomicMeasure& mu, double tol = 1e-9);

struct PositiveHullReport {
  bool passes = false;
  int lin_dim = 0;
  bool pos_equals_lin = false;
  bool antipodal_pair = false;
  std::string message;
};

PositiveHullReport positive_hull_check(const AtomicMeasure& mu, double tol = 1e-9);

/// Minimum over `samples` test directions w of mu({u : <u, w> > 0}).
/// n = 2 uses equally spaced w, n = 3 a Fibonacci set.
double min_open_hemisphere_mass(const AtomicMeasure& mu, int samples);

/// Orthonormal basis of the span of the columns of `vectors`.
Mat span_basis(const Mat& vectors, double tol = 1e-9);

}  // namespace lpm
