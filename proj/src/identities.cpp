#include "lpm/identities.hpp"

#include <cmath>
#include <limits>

namespace lpm {

double SmoothBody::volume() const { return ball_volume(dim()) * axes_.prod(); }

double SmoothBody::h0(const Vec& xi) const { return axes_.cwiseProduct(xi).norm(); }

double SmoothBody::h(const Vec& xi) const { return h0(xi) + center_.dot(xi); }

Vec SmoothBody::grad_h(const Vec& xi) const {
  const Vec a2 = axes_.cwiseProduct(axes_);
  return a2.cwiseProduct(xi) / h0(xi) + center_;
}

double SmoothBody::H(const Vec& xi) const {
  const double v = h(xi);
  return 0.5 * v * v;
}

Vec SmoothBody::grad_H(const Vec& xi) const { return h(xi) * grad_h(xi); }

// Gauge: positive s with sum ((s x_i - c_i) / a_i)^2 = 1 gives polar_h = s.
double SmoothBody::polar_h(const Vec& x) const {
  const Vec ia2 = axes_.cwiseProduct(axes_).cwiseInverse();
  const double a = x.cwiseProduct(x).dot(ia2);
  const double b = x.cwiseProduct(center_).dot(ia2);
  const double c0 = center_.cwiseProduct(center_).dot(ia2) - 1.0;
  const double disc = b * b - a * c0;
  return (std::sqrt(disc) - b) / (-c0);
}

Vec SmoothBody::grad_polar_h(const Vec& x) const {
  const Vec ia2 = axes_.cwiseProduct(axes_).cwiseInverse();
  const double a = x.cwiseProduct(x).dot(ia2);
  const double b = x.cwiseProduct(center_).dot(ia2);
  const double c0 = center_.cwiseProduct(center_).dot(ia2) - 1.0;
  const double disc = b * b - a * c0;
  const Vec ga = 2.0 * x.cwiseProduct(ia2);
  const Vec gb = center_.cwiseProduct(ia2);
  const Vec gd = 2.0 * b * gb - c0 * ga;
  return (gd / (2.0 * std::sqrt(disc)) - gb) / (-c0);
}

double SmoothBody::curvature_fn(const Vec& xi) const {
  const double a2 = axes_.cwiseProduct(axes_).prod();
  return a2 * std::pow(h0(xi), -(dim() + 1.0));
}

double SmoothBody::centro_affine_curvature(const Vec& u) const {
  return 1.0 / (curvature_fn(u) * std::pow(h(u), dim() + 1.0));
}

double SmoothBody::fp(const Vec& xi, double p) const {
  const double base = mismatched_ ? h0(xi) : h(xi);
  return std::pow(base, 1.0 - p) * curvature_fn(xi);
}

Vec SmoothBody::grad_fp(const Vec& xi, double p) const {
  const int n = dim();
  const double a2 = axes_.cwiseProduct(axes_).prod();
  const double g0 = h0(xi);
  const Vec dg0 = axes_.cwiseProduct(axes_).cwiseProduct(xi) / g0;
  const double base = mismatched_ ? g0 : h(xi);
  const Vec dbase = mismatched_ ? dg0 : Vec(dg0 + center_);
  const double f = a2 * std::pow(g0, -(n + 1.0));
  const Vec df = -(n + 1.0) * a2 * std::pow(g0, -(n + 2.0)) * dg0;
  return (1.0 - p) * std::pow(base, -p) * f * dbase + std::pow(base, 1.0 - p) * df;
}

SmoothBody ellipsoid_model(const Vec& semiaxes, const Vec& center, bool mismatched_origin) {
  const int n = static_cast<int>(semiaxes.size());
  if (n != 2 && n != 3) throw InvalidArgument("ellipsoid model supports n = 2 and n = 3");
  for (int i = 0; i < n; ++i)
    if (!(semiaxes[i] > 0.0)) throw InvalidArgument("semiaxes must be positive");
  SmoothBody b;
  b.axes_ = semiaxes;
  b.center_ = center.size() == 0 ? Vec::Zero(n) : center;
  if (b.center_.size() != n) throw InvalidArgument("center has the wrong dimension");
  if (b.center_.cwiseQuotient(semiaxes).squaredNorm() >= 1.0) throw InvalidArgument("origin must be interior");
  b.mismatched_ = mismatched_origin;

  // Closed-form gradient of f_p against central differences.
  const double step = 1e-6;
  for (int k = 0; k < 4; ++k) {
    Vec xi(n);
    for (int i = 0; i < n; ++i) xi[i] = std::cos(1.3 * k + 0.7 * i + 0.2);
    xi.normalize();
    for (double p : {-1.0, 0.5}) {
      const Vec g = b.grad_fp(xi, p);
      for (int j = 0; j < n; ++j) {
        Vec e = Vec::Zero(n);
        e[j] = step;
        const double fd = (b.fp(xi + e, p) - b.fp(xi - e, p)) / (2.0 * step);
        if (std::abs(fd - g[j]) > 1e-6 * std::max(1.0, g.cwiseAbs().maxCoeff()))
          throw Error("closed-form gradient of f_p disagrees with finite differences");
      }
    }
  }
  return b;
}

double homogeneous_contour_integral(const std::function<double(const Vec&)>& g, const DirectionGrid& grid) {
  double s = 0.0;
  for (int a = 0; a < grid.size(); ++a) s += g(grid.node(a)) * grid.weight(a);
  return s;
}

FpIdentity fp_identity_matrix(const SmoothBody& body, double p, const DirectionGrid& grid) {
  const int n = body.dim();
  if (grid.dim() != n) throw InvalidArgument("grid dimension differs from the body");
  if (p == 0.0) throw InvalidArgument("the identity needs p != 0");
  FpIdentity out;
  out.matrix = Mat::Zero(n, n);
  for (int a = 0; a < grid.size(); ++a) {
    const Vec u = grid.node(a);
    const double hp = std::pow(body.h(u), p);
    out.matrix += grid.weight(a) * hp * u * body.grad_fp(u, p).transpose();
  }
  const double scale = (n + p) * body.volume();
  out.target = -scale * Mat::Identity(n, n);
  out.deviation = out.matrix - out.target;
  out.max_abs_deviation = out.deviation.cwiseAbs().maxCoeff();
  out.max_rel_deviation =
      std::abs(scale) > 0.0 ? out.max_abs_deviation / std::abs(scale) : std::numeric_limits<double>::infinity();
  double diag = 0.0, off = 0.0;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      (i == j ? diag : off) = std::max(i == j ? diag : off, std::abs(out.matrix(i, j)));
  out.offdiag_ratio = diag > 0.0 ? off / diag : std::numeric_limits<double>::infinity();
  return out;
}

}  // namespace lpm
