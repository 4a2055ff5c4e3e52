#include <doctest.h>

#include <array>
#include <limits>
#include <random>

#include "lpm/energy.hpp"
#include "oracles.hpp"

using namespace lpm;

namespace {

GridPtr circle(int res = 256) { return std::make_shared<const DirectionGrid>(build_grid(2, res)); }

SphericalMeasure uniform(const GridPtr& g, double c = 1.0) {
  return density_measure([c](const Vec&) { return c; }, g);
}

// Halfplanes of the CCW polygon with the given vertices.
Body from_vertices(const std::vector<std::array<double, 2>>& v) {
  const int m = static_cast<int>(v.size());
  Mat u(2, m);
  Vec h(m);
  for (int i = 0; i < m; ++i) {
    const auto& a = v[i];
    const auto& b = v[(i + 1) % m];
    Vec nrm(2);
    nrm << b[1] - a[1], -(b[0] - a[0]);
    nrm.normalize();
    u.col(i) = nrm;
    h[i] = nrm[0] * a[0] + nrm[1] * a[1];
  }
  return wulff_shape(2, u, h);
}

Body disk_polygon(const GridPtr& g) { return wulff_shape(2, g->nodes(), Vec::Ones(g->size())); }

}  // namespace

TEST_CASE("profile examples") {
  const EnergyProfile a = build_profile(-1.0, 2, 0.1);
  CHECK(a.is_phi());
  CHECK(a.q() == 1.0);
  for (double t : {0.01, 0.1, 0.25, 1.0, 7.0}) CHECK(a.value(t) == doctest::Approx(-1.0 / t));

  const EnergyProfile b = build_profile(0.5, 2, 0.1);
  CHECK(b.value(1.0) == 1.0);
  CHECK(b.d1(1.0) == 0.5);

  const EnergyProfile c = build_profile(0.0, 2, 0.1);
  CHECK(c.value(0.05) == doctest::Approx(-20.0));
  CHECK(c.q() == 1.0);
  CHECK(build_profile(-2.5, 3, 0.1).q() == 2.5);
  CHECK(build_profile(-0.5, 3, 0.1).q() == 2.0);
  CHECK(std::isinf(b.value(0.0)));
}

TEST_CASE("profile suite over p and eps") {
  for (double p : {0.9, 0.5, 0.0, -0.5, -1.0, -1.9})
    for (double eps : {0.3, 0.1, 0.01}) {
      CAPTURE(p);
      CAPTURE(eps);
      const EnergyProfile f = build_profile(p, 2, eps);
      const double q = f.q();
      bool pieces = true, mono = true, conc = true, lower = true;
      for (int k = 1; k <= 10000; ++k) {
        const double t = 10.0 * k / 10001.0;
        if (t >= 3 * eps && f.value(t) != f.phi(t)) pieces = false;
        if (t <= eps && f.value(t) != -std::pow(t, -q)) pieces = false;
        if (!(f.d1(t) > 0.0)) mono = false;
        if (!(f.d2(t) < 0.0)) conc = false;
        if (t < 1.0 && f.value(t) < -std::pow(t, -q)) lower = false;
      }
      CHECK(pieces);
      CHECK(mono);
      CHECK(conc);
      CHECK(lower);
      for (double t : {eps, 3 * eps}) {
        // Across the joint the slope may move by at most the curvature times the gap.
        const double h = 1e-12 * t;
        const double curv = std::max(std::abs(f.d2(t - h)), std::abs(f.d2(t + h)));
        CHECK(std::abs(f.value(t - h) - f.value(t + h)) <= 1e-9 * std::max(1.0, std::abs(f.value(t))));
        CHECK(std::abs(f.d1(t - h) - f.d1(t + h)) <= 1e-8 * std::max(1.0, f.d1(t)) + 2 * h * curv);
      }
      if (p <= -1.0) {
        CHECK(f.is_phi());
        for (int k = 1; k <= 100; ++k) CHECK(f.value(0.05 * k) == f.phi(0.05 * k));
      } else {
        CHECK_FALSE(f.is_phi());
      }
    }
}

TEST_CASE("profile argument checks") {
  CHECK_THROWS_AS(build_profile(1.0, 2, 0.1), InvalidArgument);
  CHECK_THROWS_AS(build_profile(-2.0, 2, 0.1), InvalidArgument);
  CHECK_THROWS_AS(build_profile(0.5, 2, 0.34), InvalidArgument);
  CHECK_THROWS_AS(build_profile(0.5, 2, 0.0), InvalidArgument);
}

TEST_CASE("energy examples") {
  const GridPtr g = circle();
  const SphericalMeasure mu = uniform(g);
  const Body disk = disk_polygon(g);
  const EnergyProfile f = build_profile(0.5, 2, 0.01);
  const double e0 = energy(disk, Vec::Zero(2), mu, f);
  CHECK(std::abs(e0 / (2 * std::numbers::pi) - 1) <= 0.01);
  Vec x(2);
  x << 0.3, 0.0;
  CHECK(energy(disk, x, mu, f) < e0);

  AtomicMeasure axes;
  axes.dim = 2;
  axes.directions.resize(2, 4);
  axes.directions << 1, -1, 0, 0, 0, 0, 1, -1;
  axes.masses = Vec::Ones(4);
  Mat u = axes.directions;
  const Body sq = wulff_shape(2, u, Vec::Ones(4));
  CHECK(std::abs(energy(sq, Vec::Zero(2), axes, build_profile(0.0, 2, 0.01))) < 1e-15);

  x << 2.0, 0.0;
  CHECK_THROWS_AS(energy(sq, x, axes, f), GeometryError);
}

TEST_CASE("center of the symmetric square") {
  const GridPtr g = circle();
  const SphericalMeasure mu = uniform(g);
  Mat u(2, 4);
  u << 1, -1, 0, 0, 0, 0, 1, -1;
  const Body sq = wulff_shape(2, u, Vec::Ones(4));
  for (double p : {0.5, 0.0, -0.5, -1.5}) {
    const CenterResult c = optimal_center(sq, mu, build_profile(p, 2, 0.05));
    CHECK(c.xi.norm() <= 1e-9);
    CHECK(c.grad_norm <= 1e-10 * mu.total());
  }
}

TEST_CASE("center of an asymmetric triangle against grid search") {
  const GridPtr g = circle();
  const SphericalMeasure mu = uniform(g);
  const Body tri = from_vertices({{-1.0, -0.5}, {1.5, -0.5}, {-0.2, 1.2}});
  const EnergyProfile f = build_profile(0.5, 2, 0.05);
  const CenterResult c = optimal_center(tri, mu, f);
  auto phi = [&](const Vec& x) {
    try {
      return energy(tri, x, mu, f);
    } catch (const GeometryError&) {
      return -std::numeric_limits<double>::infinity();
    }
  };
  Vec lo(2), hi(2);
  lo << -1.0, -0.5;
  hi << 1.5, 1.2;
  const Vec best = oracle::grid_search_max(phi, lo, hi);
  CHECK((best - c.xi).norm() <= 1e-4);
  CHECK(center_gradient(tri, c.xi, mu.to_atomic(), f).norm() <= 1e-10 * mu.total());
  CHECK(c.hessian.selfadjointView<Eigen::Lower>().eigenvalues().maxCoeff() < 0.0);
}

TEST_CASE("concavity, gradient and hessian on random bodies") {
  std::mt19937 rng(3);
  std::uniform_real_distribution<double> w(0, 1);
  const GridPtr g = circle();
  const SphericalMeasure mu =
      density_measure([](const Vec& u) { return 1.0 + 0.5 * u[0] - 0.3 * u[1] * u[1]; }, g);
  const AtomicMeasure atoms = mu.to_atomic();
  int triples = 0;
  for (unsigned seed = 1; seed <= 10; ++seed) {
    const auto hs = oracle::random_polygon(seed);
    const Body b = wulff_shape(2, hs.normals, hs.offsets);
    for (double p : {0.5, 0.0, -1.0, -1.5}) {
      const EnergyProfile f = build_profile(p, 2, 0.05);
      auto point = [&] {
        Vec lam(b.vertices().cols());
        for (int k = 0; k < lam.size(); ++k) lam[k] = w(rng) + 0.05;
        return Vec(0.98 * b.vertices() * (lam / lam.sum()) + 0.02 * b.interior_point());
      };
      for (int t = 0; t < 25; ++t, ++triples) {
        const Vec x1 = point(), x2 = point();
        const double l = w(rng);
        const double mid = energy(b, l * x1 + (1 - l) * x2, mu, f);
        CHECK(mid >= l * energy(b, x1, mu, f) + (1 - l) * energy(b, x2, mu, f) - 1e-12);
      }
      const Vec x = point();
      const Vec grad = center_gradient(b, x, atoms, f);
      for (int d = 0; d < 2; ++d) {
        const double step = 1e-6;
        Vec e = Vec::Zero(2);
        e[d] = step;
        const double fd = (energy(b, x + e, mu, f) - energy(b, x - e, mu, f)) / (2 * step);
        CHECK(std::abs(fd - grad[d]) <= 1e-6 * std::max(1.0, grad.cwiseAbs().maxCoeff()));
      }
      const CenterResult c = optimal_center(b, mu, f);
      CHECK(c.hessian.selfadjointView<Eigen::Lower>().eigenvalues().maxCoeff() < 0.0);
      CHECK(c.grad_norm <= 1e-10 * mu.total());
    }
  }
  CHECK(triples == 1000);
}

TEST_CASE("energy blows down near the boundary") {
  const GridPtr g = circle();
  const SphericalMeasure mu = uniform(g);
  Mat u(2, 4);
  u << 1, -1, 0, 0, 0, 0, 1, -1;
  const Body sq = wulff_shape(2, u, Vec::Ones(4));
  for (double p : {0.5, 0.0, -0.5, -1.5}) {
    const EnergyProfile f = build_profile(p, 2, 0.1);
    const CenterResult c = optimal_center(sq, mu, f);
    // Towards the vertex (1, 1): distance to the boundary is 1 - x.
    Vec x = Vec::Constant(2, 1.0 - 1e-4);
    CHECK(energy(sq, x, mu, f) < c.energy - 1e3);
  }
  const GridPtr s2 = std::make_shared<const DirectionGrid>(build_grid(3, 500));
  const SphericalMeasure mu3 = uniform(s2);
  Mat u3(3, 6);
  u3 << 1, -1, 0, 0, 0, 0, 0, 0, 1, -1, 0, 0, 0, 0, 0, 0, 1, -1;
  const Body cube = wulff_shape(3, u3, Vec::Ones(6));
  const EnergyProfile f3 = build_profile(0.5, 3, 0.1);
  const CenterResult c3 = optimal_center(cube, mu3, f3);
  // Vertex approach again, as in the plane.
  const Vec x3 = Vec::Constant(3, 1.0 - 1e-4);
  CHECK(energy(cube, x3, mu3, f3) < c3.energy - 1e3);
}
