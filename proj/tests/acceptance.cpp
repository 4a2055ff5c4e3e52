// Acceptance run: one PASS/FAIL line per criterion, nonzero exit if any fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "lpm/energy.hpp"
#include "lpm/identities.hpp"
#include "lpm/measures.hpp"
#include "lpm/solver.hpp"
#include "oracles.hpp"

using namespace lpm;

namespace {

struct Criterion {
  bool ok = true;
  std::vector<std::string> failures;
  std::ostringstream info;

  void expect(bool cond, const std::string& what) {
    if (!cond) {
      ok = false;
      if (failures.size() < 8) failures.push_back(what);
    }
  }
};

std::string fmt(const char* f, double a, double b = 0.0, double c = 0.0) {
  char buf[256];
  std::snprintf(buf, sizeof buf, f, a, b, c);
  return buf;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

GridPtr make_grid(int n, int res, const std::optional<Group>& g = std::nullopt) {
  return std::make_shared<const DirectionGrid>(build_grid(n, res, g));
}

SphericalMeasure constant(const GridPtr& g, double c) {
  return density_measure([c](const Vec&) { return c; }, g);
}

// 1. Balls from constant densities.
void ball_recovery(Criterion& cr) {
  double worst = 0.0, slowest = 0.0;
  struct Case {
    int n;
    double p;
  };
  const std::vector<Case> cases = {{2, 0.5}, {2, 0.0}, {2, -0.5}, {2, -1.5}, {3, 0.5}, {3, -1.0}};
  for (const Case& k : cases) {
    const GridPtr g = make_grid(k.n, k.n == 2 ? 256 : 500);
    const double tol = k.n == 2 ? 0.02 : 0.03;
    for (double c : {1.0, std::pow(2.0, k.n - k.p)}) {
      const auto t0 = std::chrono::steady_clock::now();
      const SolveResult s = solve(constant(g, c), k.p);
      const double secs = seconds_since(t0);
      slowest = std::max(slowest, secs);
      const std::string tag = fmt("n=%g p=%g c=%g", k.n, k.p, c);
      cr.expect(s.body.has_value(), tag + ": no body");
      if (!s.body) continue;
      cr.expect(s.report.converged, tag + ": not converged");
      const double r = std::pow(c, 1.0 / (k.n - k.p));
      const Vec h = support(*s.body, g->nodes());
      const double dev = ((h.array() - r).abs() / r).maxCoeff();
      worst = std::max(worst, dev);
      cr.expect(dev <= tol, tag + fmt(": deviation %.4g > %.2g", dev, tol));
      cr.expect(secs <= 120.0, tag + fmt(": %.1f s", secs));
    }
  }
  cr.info << fmt("worst relative deviation %.3g, slowest case %.2f s", worst, slowest);
}

// 2. Stationarity of every converged stage, recomputed from the stage body.
void stationarity(Criterion& cr) {
  double worst = 0.0;
  int checked = 0;
  const GridPtr g = make_grid(2, 192);
  const std::vector<std::pair<std::string, Density>> densities = {
      {"linear", [](const Vec& u) { return 1.0 + 0.4 * u[0] - 0.3 * u[1]; }},
      {"quartic", [](const Vec& u) { return 1.2 + std::pow(u[0], 4) - 0.5 * u[0] * u[1]; }}};
  for (const auto& [name, f] : densities) {
    const SphericalMeasure mu = density_measure(f, g);
    for (double p : {0.5, 0.0, -1.0}) {
      SolveOptions o;
      const SolveResult s = solve(mu, p, o);
      for (const StageRecord& st : s.report.stages)
        if (st.converged) {
          worst = std::max(worst, st.residual);
          cr.expect(st.residual <= 1e-6, name + fmt(" p=%g eps=%g: reported %.3g", p, st.eps, st.residual));
        }
      // Independent recomputation along the same continuation.
      Vec h0;
      for (int k = 0; k < o.stages; ++k) {
        const double eps = o.eps0 * std::pow(2.0, -k);
        const EnergyProfile prof = build_profile(p, 2, eps);
        const FixedEpsResult r = minimize_fixed_eps(mu, prof, o, h0);
        if (!r.record.converged) {
          cr.expect(s.report.stages.size() <= static_cast<std::size_t>(k) || !s.report.stages[k].converged,
                    name + fmt(" p=%g eps=%g: rerun disagrees", p, eps));
          break;
        }
        const Body& b = r.body;
        const Vec gaps = b.support_values() - g->nodes().transpose() * r.center.xi;
        double lambda = 0.0;
        for (int i = 0; i < g->size(); ++i) lambda += gaps[i] * prof.d1(gaps[i]) * mu.masses()[i];
        lambda /= 2.0;
        double res = 0.0;
        for (int i = 0; i < g->size(); ++i)
          res = std::max(res, std::abs(prof.d1(gaps[i]) * mu.masses()[i] - lambda * b.facet_areas()[i]));
        worst = std::max(worst, res / lambda);
        ++checked;
        cr.expect(res <= 1e-6 * lambda, name + fmt(" p=%g eps=%g: recomputed %.3g", p, eps, res / lambda));
        h0 = b.support_values();
      }
    }
  }
  cr.expect(checked >= 12, "too few converged stages");
  cr.info << fmt("%g stages recomputed, worst max|r|/lambda %.3g", checked, worst);
}

// 3. L_p measures of random polygons, smoothed and solved back.
void round_trip(Criterion& cr) {
  double worst = 0.0;
  const GridPtr g = make_grid(2, 256);
  for (unsigned seed = 1; seed <= 5; ++seed) {
    const auto hs = oracle::random_polygon(seed);
    const Body k = wulff_shape(2, hs.normals, hs.offsets);
    for (double p : {0.5, -1.0}) {
      const AtomicMeasure target = lp_surface_area_measure(k, p);
      const SmoothingResult sm = smooth_discrete(target, g, 32);
      const SolveResult s = solve(sm.measure, p);
      const std::string tag = fmt("seed=%g p=%g", seed, p);
      cr.expect(s.body.has_value(), tag + ": no body");
      if (!s.body) continue;
      const VerifyResult v = verify(*s.body, sm.measure, p);
      worst = std::max(worst, v.residual_l1);
      cr.expect(v.residual_l1 <= 0.05, tag + fmt(": residual_l1 %.4g", v.residual_l1));
      cr.expect(std::abs(sm.measure.total() - s.body->facet_areas().dot(
                                                  s.body->support_values().array().pow(1 - p).matrix())) <=
                    0.05 * sm.measure.total(),
                tag + ": total mass");
    }
  }
  cr.info << fmt("worst residual_l1 %.3g", worst);
}

// 4. The critical identity on ellipses.
void critical_identity(Criterion& cr) {
  const DirectionGrid g = build_grid(2, 720);
  const Vec ones = Vec::Ones(2);
  Vec ell(2);
  ell << 1.5, 1.0;
  double ball = 0.0;
  for (double p : {0.5, -0.5, -1.0, -1.5, -2.0}) {
    const FpIdentity id = fp_identity_matrix(ellipsoid_model(ones), p, g);
    ball = std::max(ball, id.max_abs_deviation);
  }
  cr.expect(ball <= 1e-8, fmt("unit disk deviation %.3g", ball));

  const FpIdentity m1 = fp_identity_matrix(ellipsoid_model(ell), -1.0, g);
  cr.expect(m1.max_rel_deviation <= 1e-3, fmt("ellipse p=-1 relative %.3g", m1.max_rel_deviation));
  cr.expect(m1.offdiag_ratio <= 1e-6, fmt("ellipse p=-1 off-diagonal %.3g", m1.offdiag_ratio));
  const FpIdentity m2 = fp_identity_matrix(ellipsoid_model(ell), -2.0, g);
  cr.expect(m2.max_abs_deviation <= 1e-6, fmt("ellipse p=-2 diagonal %.3g", m2.max_abs_deviation));
  const double diag_scale = m1.matrix.diagonal().cwiseAbs().maxCoeff();
  cr.expect(std::abs(m2.matrix(0, 1)) <= 1e-6 * diag_scale, "ellipse p=-2 off-diagonal");

  Vec c(2);
  c << 0.3, -0.2;
  const FpIdentity ctrl = fp_identity_matrix(ellipsoid_model(ell, c, true), -1.0, g);
  cr.expect(ctrl.max_rel_deviation >= 1e-2, fmt("off-center control only %.3g", ctrl.max_rel_deviation));
  const FpIdentity shifted = fp_identity_matrix(ellipsoid_model(ell, c, false), -1.0, g);
  cr.expect(shifted.max_rel_deviation <= 1e-3, fmt("translated ellipse %.3g", shifted.max_rel_deviation));
  cr.info << fmt("disk %.2g, ellipse p=-1 %.2g, control %.2g", ball, m1.max_rel_deviation, ctrl.max_rel_deviation);
}

// 5. Inequalities over random bodies, with extremal quantities from the oracles where possible.
void inequalities(Criterion& cr) {
  const DirectionGrid g2 = build_grid(2, 720), g3 = build_grid(3, 2000);
  std::mt19937 rng(17);
  std::uniform_real_distribution<double> w(0, 1);
  int bodies = 0;
  double bs_worst = 0.0;
  for (unsigned seed = 1; seed <= 200; ++seed) {
    const int n = seed % 2 ? 2 : 3;
    const auto hs = n == 2 ? oracle::random_polygon(seed) : oracle::random_polytope3(seed);
    const Body b = wulff_shape(n, hs.normals, hs.offsets);
    ++bodies;
    const std::string tag = fmt("seed=%g n=%g", seed, n);
    const auto verts = oracle::brute_vertices(hs.normals, hs.offsets);
    const Vec& sigma = b.centroid();
    const double vol = n == 2 ? oracle::shoelace(verts) : b.volume();
    cr.expect(std::abs(vol - b.volume()) <= 1e-9 * vol, tag + ": volume");

    const DirectionGrid& g = n == 2 ? g2 : g3;
    double polar = 0.0;
    for (int a = 0; a < g.size(); ++a) {
      const Vec u = g.node(a);
      polar += std::pow(oracle::brute_support(verts, u) - u.dot(sigma), -n) * g.weight(a) / n;
    }
    const double bs = polar * vol / (ball_volume(n) * ball_volume(n));
    bs_worst = std::max(bs_worst, bs);
    cr.expect(bs <= 1.02, tag + fmt(": Blaschke-Santalo ratio %.4g", bs));

    double rho = INFINITY, big_r = 0.0;
    for (int i = 0; i < hs.offsets.size(); ++i)
      rho = std::min(rho, hs.offsets[i] - hs.normals.col(i).dot(sigma));
    for (const Vec& v : verts) big_r = std::max(big_r, (v - sigma).norm());
    cr.expect(vol <= (n + 1) * ball_volume(n - 1) * rho * std::pow(big_r, n - 1), tag + ": volume bound");

    const double r = b.chebyshev_radius();
    const Vec& x0 = b.interior_point();
    for (int i = 0; i < hs.offsets.size(); ++i)
      cr.expect(hs.offsets[i] - hs.normals.col(i).dot(x0) >= r * (1 - 1e-12), tag + ": inscribed ball");
    for (double p : {0.5, 0.0, -1.0}) {
      const double total = lp_surface_area_measure(b, p).total();
      cr.expect(total >= ball_volume(n - 1) * std::pow(r, n - p), tag + fmt(": inradius bound p=%g", p));
    }

    for (int t = 0; t < 64; ++t) {
      Vec lam(static_cast<Eigen::Index>(verts.size()));
      for (int k = 0; k < lam.size(); ++k) lam[k] = std::pow(w(rng), 4);
      lam /= lam.sum();
      Vec x = Vec::Zero(n);
      for (int k = 0; k < lam.size(); ++k) x += lam[k] * verts[k];
      const Vec y = sigma - (x - sigma) / n;
      cr.expect(((hs.normals.transpose() * y - hs.offsets).array() <= 1e-9).all(), tag + ": centroid reflection");
    }
  }
  cr.info << fmt("%g bodies, largest Blaschke-Santalo ratio %.4g", bodies, bs_worst);
}

// 6. The modified profile.
void profiles(Criterion& cr) {
  int grids = 0;
  for (double p : {0.9, 0.5, 0.0, -0.5, -1.0, -1.9})
    for (double eps : {0.3, 0.1, 0.01}) {
      ++grids;
      const EnergyProfile f = build_profile(p, 2, eps);
      const double q = f.q();
      const std::string tag = fmt("p=%g eps=%g", p, eps);
      bool pieces = true, mono = true, conc = true, lower = true;
      for (int k = 1; k <= 10000; ++k) {
        const double t = 10.0 * k / 10001.0;
        if (t >= 3 * eps && f.value(t) != f.phi(t)) pieces = false;
        if (t <= eps && f.value(t) != -std::pow(t, -q)) pieces = false;
        if (!(f.d1(t) > 0.0)) mono = false;
        if (!(f.d2(t) < 0.0)) conc = false;
      }
      for (int k = 1; k < 10000; ++k) {
        const double t = k / 10000.0;
        if (f.value(t) < -std::pow(t, -q)) lower = false;
      }
      cr.expect(pieces, tag + ": pieces");
      cr.expect(mono, tag + ": monotone");
      cr.expect(conc, tag + ": concave");
      cr.expect(lower, tag + ": lower bound");
      if (p <= -1.0) {
        bool same = f.is_phi();
        for (int k = 1; k <= 10000; ++k) same = same && f.value(1e-3 * k) == f.phi(1e-3 * k);
        cr.expect(same, tag + ": differs from phi");
      }
    }
  cr.info << fmt("%g (p, eps) pairs", grids);
}

// 7. Quarter-arc density through symmetrization.
void hemisphere(Criterion& cr) {
  const GridPtr g = make_grid(2, 240);
  const SphericalMeasure arc = density_measure(
      [](const Vec& u) {
        const double t = std::atan2(u[1], u[0]);
        return t >= 0.0 && t <= std::numbers::pi / 2 ? 1.0 : 0.0;
      },
      g);
  const AtomicMeasure mu = arc.to_atomic(true);
  const HemisphereResult hr = solve_hemisphere(mu, 0.5, 240, 32);
  cr.expect(hr.solution.report.converged, "solve on mu0 did not converge");
  cr.expect(hr.restricted.has_value(), "no restricted body");
  cr.expect(hr.verification.residual_l1 <= 0.07, fmt("residual_l1 %.4g", hr.verification.residual_l1));
  double least = INFINITY;
  const AtomicMeasure& mu0 = hr.symmetrization.mu0;
  for (int k = 0; k < 360; ++k) {
    const double t = 2.0 * std::numbers::pi * k / 360.0;
    double m = 0.0;
    for (Eigen::Index a = 0; a < mu0.directions.cols(); ++a)
      if (std::cos(t) * mu0.directions(0, a) + std::sin(t) * mu0.directions(1, a) > 0.0) m += mu0.masses[a];
    least = std::min(least, m);
  }
  cr.expect(least > 0.0, "an open hemisphere of mu0 is empty");
  cr.info << fmt("residual_l1 %.3g, least open hemisphere mass %.3g", hr.verification.residual_l1, least);
}

// 8. Hypothesis checkers.
void checkers(Criterion& cr) {
  AtomicMeasure cube;
  cube.dim = 3;
  cube.directions.resize(3, 6);
  cube.directions << 1, -1, 0, 0, 0, 0, 0, 0, 1, -1, 0, 0, 0, 0, 0, 0, 1, -1;
  cube.masses = Vec::Constant(6, 4.0 / 3.0);  // cone volumes of [-1, 1]^3
  const SubspaceReport sc = subspace_concentration_check(cube);
  cr.expect(sc.satisfied, "cube: subspace concentration violated");
  cr.expect(sc.equality, "cube: no equality detected");
  bool with_complement = false;
  for (const SubspaceWitness& wt : sc.witnesses) with_complement = with_complement || (wt.equality && wt.complement);
  cr.expect(with_complement, "cube: no complementary subspace");

  AtomicMeasure pair;
  pair.dim = 2;
  pair.directions.resize(2, 2);
  pair.directions << 1, -1, 0, 0;
  pair.masses = Vec::Ones(2);
  cr.expect(!subspace_concentration_check(pair).satisfied, "{+-e1}: subspace concentration holds");
  const PositiveHullReport ph = positive_hull_check(pair);
  cr.expect(!ph.passes && ph.antipodal_pair, "{+-e1}: antipodal pair not rejected");

  AtomicMeasure single;
  single.dim = 2;
  single.directions = Vec::Unit(2, 0);
  single.masses = Vec::Ones(1);
  cr.expect(positive_hull_check(single).passes, "{e1}: positive hull check fails");
  cr.info << fmt("cube witnesses %g", static_cast<double>(sc.witnesses.size()));
}

// 9. Center and outer gradients against central differences.
void gradients(Criterion& cr) {
  std::mt19937 rng(23);
  std::uniform_real_distribution<double> w(-1, 1);
  double worst_c = 0.0, worst_o = 0.0;

  const GridPtr g = make_grid(2, 256);
  const SphericalMeasure mu = density_measure([](const Vec& u) { return 1.0 + 0.5 * u[0] - 0.3 * u[1] * u[1]; }, g);
  const AtomicMeasure atoms = mu.to_atomic();
  for (unsigned seed = 1; seed <= 10; ++seed) {
    const auto hs = oracle::random_polygon(seed);
    const Body b = wulff_shape(2, hs.normals, hs.offsets);
    for (double p : {0.5, 0.0, -1.0, -1.5}) {
      const EnergyProfile f = build_profile(p, 2, 0.05);
      Vec x = 0.5 * b.interior_point();
      x[0] += 0.05 * w(rng);
      x[1] += 0.05 * w(rng);
      const Vec grad = center_gradient(b, x, atoms, f);
      const double scale = std::max(1.0, grad.cwiseAbs().maxCoeff());
      for (int d = 0; d < 2; ++d) {
        const double step = 1e-6;
        Vec e = Vec::Zero(2);
        e[d] = step;
        const double fd = (energy(b, x + e, mu, f) - energy(b, x - e, mu, f)) / (2 * step);
        worst_c = std::max(worst_c, std::abs(fd - grad[d]) / scale);
        cr.expect(std::abs(fd - grad[d]) <= 1e-6 * scale, fmt("center seed=%g p=%g: %.3g", seed, p, fd - grad[d]));
      }
    }
  }

  const GridPtr g64 = make_grid(2, 64);
  const SphericalMeasure mu64 =
      density_measure([](const Vec& x) { return 1.0 + 0.5 * x[0] - 0.2 * x[0] * x[1]; }, g64);
  std::uniform_int_distribution<int> pick(0, g64->size() - 1);
  for (double p : {0.5, 0.0, -1.0}) {
    const EnergyProfile f = build_profile(p, 2, 0.05);
    const double a = w(rng), b2 = w(rng), c3 = w(rng);
    Vec h(g64->size());
    for (int i = 0; i < h.size(); ++i) {
      const double t = std::atan2(g64->node(i)[1], g64->node(i)[0]);
      h[i] = 1.0 + 0.1 * a * std::cos(t) + 0.05 * b2 * std::sin(2 * t) + 0.03 * c3 * std::cos(3 * t);
    }
    const Body b = wulff_shape(2, g64->nodes(), h);
    cr.expect((b.facet_areas().array() > 0.0).all(), "outer: a facet vanished");
    const double s = std::pow(b.volume(), -0.5);
    const Body nb = scale(b, s);
    const CenterResult c = optimal_center(nb, mu64, f);
    const Vec grad = s * el_residual(nb, c.xi, mu64, f).r;
    const double gscale = grad.cwiseAbs().maxCoeff();
    for (int k = 0; k < 20; ++k) {
      const int i = pick(rng);
      const double step = 1e-6;
      Vec hp = h, hm = h;
      hp[i] += step;
      hm[i] -= step;
      const double fd = (outer_energy(hp, mu64, f) - outer_energy(hm, mu64, f)) / (2 * step);
      worst_o = std::max(worst_o, std::abs(fd - grad[i]) / gscale);
      cr.expect(std::abs(fd - grad[i]) <= 1e-4 * gscale, fmt("outer p=%g node %g: %.3g", p, i, fd - grad[i]));
    }
  }
  cr.info << fmt("center %.2g, outer %.2g (relative)", worst_c, worst_o);
}

// 10. Square-symmetric data gives a square-symmetric body.
void invariance(Criterion& cr) {
  const Group d4 = dihedral_group(4);
  cr.expect(d4.size() == 8, "group order");
  const GridPtr g = make_grid(2, 256, d4);
  const SphericalMeasure mu = density_measure(
      [](const Vec& x) {
        const double t = std::atan2(x[1], x[0]);
        return 1.0 + 0.5 * std::cos(4 * t) + 0.2 * std::cos(8 * t);
      },
      g, true);
  double worst = 0.0;
  for (double p : {0.5, -1.0}) {
    const SolveResult s = solve(mu, p);
    cr.expect(s.report.converged && s.body.has_value(), fmt("p=%g: not converged", p));
    if (!s.body) continue;
    const Vec h = s.body->support_values();
    double dev = 0.0;
    for (std::size_t k = 0; k < d4.size(); ++k) {
      const auto& perm = g->permutation(static_cast<int>(k));
      for (int i = 0; i < g->size(); ++i) dev = std::max(dev, std::abs(h[perm[i]] - h[i]));
    }
    worst = std::max(worst, dev);
    cr.expect(dev <= 1e-6, fmt("p=%g: orbit deviation %.3g", p, dev));
  }
  cr.info << fmt("orbit deviation %.2g", worst);
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<void(Criterion&)>>> all = {
      {"ball recovery", ball_recovery},   {"stationarity", stationarity},
      {"round trip", round_trip},         {"critical identity", critical_identity},
      {"inequalities", inequalities},     {"energy profile", profiles},
      {"hemisphere pipeline", hemisphere}, {"checkers", checkers},
      {"gradients", gradients},           {"invariance", invariance}};
  int failed = 0;
  for (std::size_t i = 0; i < all.size(); ++i) {
    Criterion cr;
    const auto t0 = std::chrono::steady_clock::now();
    try {
      all[i].second(cr);
    } catch (const std::exception& e) {
      cr.expect(false, std::string("exception: ") + e.what());
    }
    std::printf("criterion %2zu %-20s %s  (%.1f s) %s\n", i + 1, all[i].first.c_str(), cr.ok ? "PASS" : "FAIL",
                seconds_since(t0), cr.info.str().c_str());
    for (const std::string& f : cr.failures) std::printf("    %s\n", f.c_str());
    if (!cr.ok) ++failed;
    std::fflush(stdout);
  }
  std::printf("%d of %zu criteria passed\n", static_cast<int>(all.size()) - failed, all.size());
  return failed ? 1 : 0;
}
