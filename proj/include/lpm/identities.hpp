#pragma once

#include <functional>

#include "lpm/sphere.hpp"
#include "lpm/types.hpp"

namespace lpm {

/// Ellipsoid E = {sum x_i^2 / a_i^2 <= 1} translated by `center`, with its
/// homogeneous support, gauge and curvature functions in closed form.
///
/// All functions of xi are extended homogeneously from the sphere:
/// h has degree 1, the curvature function f~ degree -n-1 and f_p = h^{1-p} f~
/// degree -n-p. With a mismatched origin, f_p keeps the factor h^{1-p} of
/// the untranslated ellipsoid while h is translated; this is not the f_p of
/// any body and serves as a negative control.
class SmoothBody {
 public:
  int dim() const { return static_cast<int>(axes_.size()); }
  const Vec& semiaxes() const { return axes_; }
  const Vec& center() const { return center_; }
  bool mismatched_origin() const { return mismatched_; }
  double volume() const;

  double h(const Vec& xi) const;
  Vec grad_h(const Vec& xi) const;
  /// H = h^2 / 2.
  double H(const Vec& xi) const;
  Vec grad_H(const Vec& xi) const;

  /// Support function of the polar body, i.e. the gauge of the body.
  double polar_h(const Vec& x) const;
  Vec grad_polar_h(const Vec& x) const;

  /// Reciprocal Gauss curvature as a function of the normal.
  double curvature_fn(const Vec& xi) const;
  /// kappa_0 = kappa / h^{n+1}.
  double centro_affine_curvature(const Vec& u) const;

  double fp(const Vec& xi, double p) const;
  Vec grad_fp(const Vec& xi, double p) const;

 private:
  friend SmoothBody ellipsoid_model(const Vec&, const Vec&, bool);
  SmoothBody() = default;
  double h0(const Vec& xi) const;  // untranslated support
  Vec axes_, center_;
  bool mismatched_ = false;
};

/// Requires positive semiaxes and n in {2, 3}; `center` defaults to the origin.
/// The closed-form gradient of f_p is checked against central differences at construction.
SmoothBody ellipsoid_model(const Vec& semiaxes, const Vec& center = Vec(), bool mismatched_origin = false);

/// sum_a g(u_a) w_a; for g homogeneous of degree -n this is the contour integral.
double homogeneous_contour_integral(const std::function<double(const Vec&)>& g, const DirectionGrid& grid);

struct FpIdentity {
  Mat matrix;              // M_ij = int u_i h^p d_j f_p du
  Mat target;              // -(n + p) V I
  Mat deviation;           // matrix - target
  double max_abs_deviation = 0.0;
  double max_rel_deviation = 0.0;   // max |deviation| / (|n + p| V); inf when n + p = 0
  double offdiag_ratio = 0.0;       // max |M_ij|, i != j, over max |M_ii|
};

FpIdentity fp_identity_matrix(const SmoothBody& body, double p, const DirectionGrid& grid);

}  // namespace lpm
