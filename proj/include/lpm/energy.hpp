#pragma once

#include <string>
#include <vector>

#include "lpm/geometry.hpp"
#include "lpm/measures.hpp"
#include "lpm/types.hpp"

namespace lpm {

/// Cubic c0 + c1 s + c2 s^2 + c3 s^3 in s = t - a on [a, b].
struct BridgePiece {
  double a = 0.0, b = 0.0;
  double c0 = 0.0, c1 = 0.0, c2 = 0.0, c3 = 0.0;
};

/// phi_eps for given p, n and eps: -t^{-q} on (0, eps], a concave C^1
/// bridge on [eps, 3 eps], and phi on [3 eps, inf).
///
/// phi(t) = t^p for p in (0, 1), log t for p = 0, -t^p for p < 0, and
/// q = max(|p|, n - 1). For p <= -(n - 1) the outer pieces coincide and
/// phi_eps is phi itself.
class EnergyProfile {
 public:
  double p() const { return p_; }
  int dim() const { return dim_; }
  double eps() const { return eps_; }
  double q() const { return q_; }
  bool is_phi() const { return is_phi_; }
  /// "none", "cubic", "quadratic-mid" or "quadratic-adaptive".
  const std::string& bridge_kind() const { return kind_; }
  const std::vector<BridgePiece>& bridge() const { return pieces_; }

  /// phi_eps and its derivatives; value is -inf for t <= 0.
  double value(double t) const;
  double d1(double t) const;
  double d2(double t) const;

  /// The unmodified phi.
  double phi(double t) const;
  double dphi(double t) const;
  double d2phi(double t) const;

 private:
  friend EnergyProfile build_profile(double p, int n, double eps);
  EnergyProfile() = default;
  const BridgePiece* piece(double t) const;

  double p_ = 0.0, eps_ = 0.0, q_ = 0.0;
  int dim_ = 0;
  bool is_phi_ = false;
  std::string kind_;
  std::vector<BridgePiece> pieces_;
};

/// Requires -n < p < 1 and 0 < eps < 1/3. Throws Error if no bridge passes
/// the monotonicity / concavity / lower-bound validation.
EnergyProfile build_profile(double p, int n, double eps);

/// Sum_a phi_eps(h_K(u_a) - <u_a, xi>) mu_a. Throws GeometryError if xi is not interior.
double energy(const Body& body, const Vec& xi, const AtomicMeasure& mu, const EnergyProfile& profile);
double energy(const Body& body, const Vec& xi, const SphericalMeasure& mu, const EnergyProfile& profile);

/// Gradient in xi: -sum_a phi_eps'(gap_a) mu_a u_a.
Vec center_gradient(const Body& body, const Vec& xi, const AtomicMeasure& mu, const EnergyProfile& profile);

struct CenterResult {
  Vec xi;
  double grad_norm = 0.0;
  Mat hessian;      // sum_a u_a u_a^T phi_eps''(gap_a) mu_a at xi
  double energy = 0.0;
  int iterations = 0;
};

/// Maximizer of xi -> Phi_eps(K, xi) by damped Newton from the Chebyshev center.
CenterResult optimal_center(const Body& body, const AtomicMeasure& mu, const EnergyProfile& profile);
CenterResult optimal_center(const Body& body, const SphericalMeasure& mu, const EnergyProfile& profile);

/// Same, for atoms given by directions, support values and masses, with the
/// interior test done against the constraints (normals, hbar) of the body.
CenterResult optimal_center(const Mat& directions, const Vec& support, const Vec& masses,
                            const Mat& normals, const Vec& hbar, const EnergyProfile& profile,
                            const Vec& start);

}  // namespace lpm
