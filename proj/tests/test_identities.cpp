#include <doctest.h>

#include <random>

#include "lpm/identities.hpp"
#include "oracles.hpp"

using namespace lpm;

namespace {

Vec vec(std::initializer_list<double> v) {
  Vec out(static_cast<Eigen::Index>(v.size()));
  Eigen::Index k = 0;
  for (double x : v) out[k++] = x;
  return out;
}

// Central differences of the closed-form gradient of H.
Mat numeric_hessian_H(const SmoothBody& b, const Vec& xi) {
  const int n = b.dim();
  const double step = 1e-5 * xi.norm();
  Mat h(n, n);
  for (int j = 0; j < n; ++j) {
    Vec e = Vec::Zero(n);
    e[j] = step;
    h.col(j) = (b.grad_H(xi + e) - b.grad_H(xi - e)) / (2 * step);
  }
  return 0.5 * (h + h.transpose());
}

}  // namespace

TEST_CASE("ellipsoid examples") {
  for (int n : {2, 3}) {
    const SmoothBody ball = ellipsoid_model(Vec::Ones(n));
    CHECK(ball.volume() == doctest::Approx(ball_volume(n)));
    for (int k = 0; k < 10; ++k) {
      Vec u = Vec::Zero(n);
      u[0] = std::cos(0.6 * k);
      u[1] = std::sin(0.6 * k);
      CHECK(std::abs(ball.h(u) - 1.0) < 1e-15);
      CHECK(std::abs(ball.curvature_fn(u) - 1.0) < 1e-15);
      CHECK(std::abs(ball.centro_affine_curvature(u) - 1.0) < 1e-15);
    }
  }
  const SmoothBody e = ellipsoid_model(vec({2, 1}));
  CHECK(e.volume() == doctest::Approx(2 * std::numbers::pi));
  CHECK(e.h(vec({1, 0})) == 2.0);
  CHECK(e.h(vec({0, 1})) == 1.0);
  CHECK(e.polar_h(vec({2, 0})) == doctest::Approx(1.0));
}

TEST_CASE("homogeneity") {
  std::mt19937 rng(2);
  std::normal_distribution<double> g;
  for (const Vec& axes : {vec({1.5, 1}), vec({1.5, 1, 0.7})}) {
    const int n = static_cast<int>(axes.size());
    const SmoothBody b = ellipsoid_model(axes, 0.2 * Vec::Ones(n));
    for (int k = 0; k < 50; ++k) {
      const Vec xi = Vec::NullaryExpr(n, [&](Eigen::Index) { return g(rng); });
      CHECK(std::abs(b.h(2 * xi) / (2 * b.h(xi)) - 1) <= 1e-10);
      CHECK(std::abs(b.curvature_fn(2 * xi) / (std::pow(2.0, -n - 1) * b.curvature_fn(xi)) - 1) <= 1e-10);
      CHECK(std::abs(b.fp(2 * xi, -1.0) / (std::pow(2.0, -n + 1) * b.fp(xi, -1.0)) - 1) <= 1e-10);
      CHECK(std::abs(b.polar_h(3 * xi) / (3 * b.polar_h(xi)) - 1) <= 1e-10);
    }
  }
}

TEST_CASE("Legendre relations") {
  std::mt19937 rng(4);
  std::normal_distribution<double> g;
  const std::vector<std::pair<Vec, Vec>> bodies = {
      {vec({1.5, 1}), Vec()}, {vec({1.5, 1}), vec({0.3, -0.2})}, {vec({1.5, 1, 0.7}), Vec()},
      {vec({1.5, 1, 0.7}), vec({0.2, 0.1, -0.1})}};
  for (const auto& [axes, center] : bodies) {
    const SmoothBody b = ellipsoid_model(axes, center);
    const int n = b.dim();
    for (int k = 0; k < 100; ++k) {
      const Vec xi = Vec::NullaryExpr(n, [&](Eigen::Index) { return g(rng); });
      const Vec y = b.grad_H(xi);
      CHECK(std::abs(b.polar_h(y) / b.h(xi) - 1) <= 1e-10);
      CHECK((b.h(xi) * b.grad_polar_h(y) - xi).norm() <= 1e-10 * xi.norm());
      const double det = numeric_hessian_H(b, xi).determinant();
      const double want = std::pow(b.h(xi), n + 1) * b.curvature_fn(xi);
      CHECK(std::abs(det / want - 1) <= 1e-5);
    }
  }
}

TEST_CASE("curvature function against the boundary curve") {
  const double a = 1.5, bb = 1.0;
  const SmoothBody e = ellipsoid_model(vec({a, bb}));
  auto x = [&](double t) { return vec({a * std::cos(t), bb * std::sin(t)}); };
  for (int k = 0; k < 64; ++k) {
    const double t = 2 * std::numbers::pi * k / 64 + 0.01;
    const double s = 1e-4;
    const Vec d1 = (x(t + s) - x(t - s)) / (2 * s);
    const Vec d2 = (x(t + s) - 2 * x(t) + x(t - s)) / (s * s);
    const double kappa = std::abs(d1[0] * d2[1] - d1[1] * d2[0]) / std::pow(d1.norm(), 3);
    const Vec u = vec({d1[1], -d1[0]}).normalized();
    CHECK(std::abs(e.curvature_fn(u) * kappa - 1) <= 1e-4);
  }
  // The integral of the radius of curvature over the normals is the perimeter.
  const double perimeter = oracle::simpson([&](double t) { return std::hypot(a * std::sin(t), bb * std::cos(t)); }, 0,
                                           2 * std::numbers::pi);
  const DirectionGrid g = build_grid(2, 720);
  const double integral = homogeneous_contour_integral([&](const Vec& u) { return e.curvature_fn(u); }, g);
  CHECK(std::abs(integral / perimeter - 1) <= 1e-4);
}

TEST_CASE("contour integrals") {
  for (int n : {2, 3}) {
    const DirectionGrid g = build_grid(n, n == 2 ? 720 : 4000);
    const double v = homogeneous_contour_integral([&](const Vec& x) { return std::pow(x.norm(), -n); }, g);
    CHECK(std::abs(v - n * ball_volume(n)) <= 1e-12);
  }
  const DirectionGrid g = build_grid(2, 720);
  const SmoothBody e = ellipsoid_model(vec({2, 1}));
  const double polar = 0.5 * homogeneous_contour_integral([&](const Vec& x) { return std::pow(e.polar_h(x), -2); }, g);
  CHECK(std::abs(polar / (2 * std::numbers::pi) - 1) <= 1e-3);
  const double direct = 0.5 * homogeneous_contour_integral([&](const Vec& x) { return e.h(x) * e.curvature_fn(x); }, g);
  CHECK(std::abs(direct / (2 * std::numbers::pi) - 1) <= 1e-3);

  auto g1 = [](const Vec& x) { return x[0] * x[0] * x[1] + 1.0; };
  auto g2 = [](const Vec& x) { return std::exp(x[1]); };
  const double lhs = homogeneous_contour_integral([&](const Vec& x) { return 3.0 * g1(x) - 0.5 * g2(x); }, g);
  const double rhs = 3.0 * homogeneous_contour_integral(g1, g) - 0.5 * homogeneous_contour_integral(g2, g);
  CHECK(std::abs(lhs - rhs) <= 1e-14 * std::abs(rhs));
}

TEST_CASE("integral identity on the ball") {
  const DirectionGrid g = build_grid(2, 720);
  const SmoothBody ball = ellipsoid_model(Vec::Ones(2));
  for (double p : {0.5, -0.5, -1.0, -1.5, -2.0}) {
    CAPTURE(p);
    const FpIdentity id = fp_identity_matrix(ball, p, g);
    CHECK(id.max_abs_deviation <= 1e-8);
    CHECK((id.target + (2 + p) * std::numbers::pi * Mat::Identity(2, 2)).norm() < 1e-12);
  }
}

TEST_CASE("integral identity on an ellipse") {
  const DirectionGrid g = build_grid(2, 720);
  const SmoothBody e = ellipsoid_model(vec({1.5, 1}));
  const FpIdentity m1 = fp_identity_matrix(e, -1.0, g);
  CHECK(m1.matrix(0, 0) == doctest::Approx(-1.5 * std::numbers::pi).epsilon(1e-3));
  CHECK(m1.max_rel_deviation <= 1e-3);
  CHECK(std::abs(m1.matrix(0, 1)) <= 1e-6 * std::abs(m1.matrix(0, 0)));
  CHECK(std::abs(m1.matrix(1, 0)) <= 1e-6 * std::abs(m1.matrix(0, 0)));
  CHECK(m1.offdiag_ratio <= 1e-6);

  const FpIdentity m2 = fp_identity_matrix(e, -2.0, g);
  CHECK(m2.target.norm() == 0.0);
  CHECK(m2.max_abs_deviation <= 1e-6);

  for (double p : {0.5, -0.5, -1.5}) {
    CAPTURE(p);
    CHECK(fp_identity_matrix(e, p, g).max_rel_deviation <= 1e-3);
  }
  // Only o in int K matters: a translated ellipse still satisfies the identity.
  const SmoothBody shifted = ellipsoid_model(vec({1.5, 1}), vec({0.45, 0.2}));
  CHECK(fp_identity_matrix(shifted, -1.0, g).max_rel_deviation <= 1e-3);
  CHECK(fp_identity_matrix(shifted, -2.0, g).max_abs_deviation <= 1e-6);
}

TEST_CASE("integral identity in three dimensions") {
  // The Fibonacci rule is only algebraically accurate, so tolerances are looser than in the plane.
  const DirectionGrid g = build_grid(3, 4000);
  CHECK(fp_identity_matrix(ellipsoid_model(Vec::Ones(3)), -1.0, g).max_rel_deviation <= 1e-5);
  const Vec axes = vec({1.5, 1, 0.7});
  CHECK(fp_identity_matrix(ellipsoid_model(axes), -1.0, g).max_rel_deviation <= 2e-4);
  const SmoothBody shifted = ellipsoid_model(axes, vec({0.3, 0.1, -0.1}));
  const double coarse = fp_identity_matrix(shifted, -3.0, build_grid(3, 1000)).max_abs_deviation;
  const double fine = fp_identity_matrix(shifted, -3.0, g).max_abs_deviation;
  CHECK(fine <= 5e-4);
  CHECK(fine < coarse / 2);
}

TEST_CASE("mismatched origin breaks the identity") {
  const DirectionGrid g = build_grid(2, 720);
  const SmoothBody bad = ellipsoid_model(vec({1.5, 1}), vec({0.3 * 1.5, 0}), true);
  CHECK(bad.mismatched_origin());
  CHECK(fp_identity_matrix(bad, -1.0, g).max_rel_deviation > 10 * 1e-3);
  CHECK(fp_identity_matrix(bad, -0.5, g).max_rel_deviation > 10 * 1e-3);
  // At p = -n the untranslated f_p of an ellipse is constant, so the control is blind there.
  CHECK(fp_identity_matrix(bad, -2.0, g).max_abs_deviation <= 1e-12);
}

TEST_CASE("integration by parts on the sphere") {
  for (int n : {2, 3}) {
    const DirectionGrid g = build_grid(n, n == 2 ? 720 : 4000);
    for (int j = 0; j < n; ++j) {
      // phi(x) = x_1 |x|^{-n}, d_j phi = delta_1j |x|^{-n} - n x_1 x_j |x|^{-n-2}.
      const double v = homogeneous_contour_integral(
          [&](const Vec& x) {
            const double r = x.norm();
            return (j == 0 ? std::pow(r, -n) : 0.0) - n * x[0] * x[j] * std::pow(r, -n - 2);
          },
          g);
      CAPTURE(n);
      CAPTURE(j);
      CHECK(std::abs(v) <= (n == 2 ? 1e-6 : 1e-3));
    }
  }
}

TEST_CASE("quadrature refinement") {
  const SmoothBody e = ellipsoid_model(vec({1.5, 1}));
  std::vector<double> ns, devs;
  for (int res : {6, 8, 12, 16}) {
    ns.push_back(res);
    devs.push_back(fp_identity_matrix(e, -1.0, build_grid(2, res)).max_abs_deviation);
  }
  for (std::size_t k = 1; k < ns.size(); ++k) {
    const double slope = -std::log(devs[k] / devs[k - 1]) / std::log(ns[k] / ns[k - 1]);
    CAPTURE(devs[k]);
    CHECK(slope > 1.0);
  }
  const SmoothBody e3 = ellipsoid_model(vec({1.5, 1, 0.7}));
  const double coarse = fp_identity_matrix(e3, -1.0, build_grid(3, 200)).max_abs_deviation;
  const double fine = fp_identity_matrix(e3, -1.0, build_grid(3, 3200)).max_abs_deviation;
  CHECK(-std::log(fine / coarse) / std::log(16.0) > 1.0);
}

TEST_CASE("model argument checks") {
  CHECK_THROWS_AS(ellipsoid_model(vec({1, -1})), InvalidArgument);
  CHECK_THROWS_AS(ellipsoid_model(Vec::Ones(4)), InvalidArgument);
  CHECK_THROWS_AS(ellipsoid_model(vec({1, 1}), vec({1.2, 0})), InvalidArgument);
  CHECK_THROWS_AS(ellipsoid_model(vec({1, 1}), Vec::Zero(3)), InvalidArgument);
  const SmoothBody b = ellipsoid_model(vec({1, 1}));
  CHECK_THROWS_AS(fp_identity_matrix(b, 0.0, build_grid(2, 64)), InvalidArgument);
  CHECK_THROWS_AS(fp_identity_matrix(b, -1.0, build_grid(3, 64)), InvalidArgument);
}
