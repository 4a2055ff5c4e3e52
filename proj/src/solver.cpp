#include "lpm/solver.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#include "lpm/kernels.hpp"

namespace lpm {

namespace {

// Wulff shape of h on the grid, with the scale s = V^{-1/n} and the optimal
// center of the normalized body computed from scaled support values.
struct Trial {
  std::optional<Body> body;  // unnormalized W(h)
  double scale = 1.0;
  Vec hbar;                  // support values of the normalized body
  CenterResult center;
  double energy = 0.0;
};

Vec positive_masses(const SphericalMeasure& mu, std::vector<int>& idx) {
  idx.clear();
  for (int i = 0; i < mu.size(); ++i)
    if (mu.masses()[i] > 0.0) idx.push_back(i);
  Vec m(static_cast<Eigen::Index>(idx.size()));
  for (std::size_t k = 0; k < idx.size(); ++k) m[k] = mu.masses()[idx[k]];
  return m;
}

Trial make_trial(const Vec& h, const SphericalMeasure& mu, const EnergyProfile& profile, const Vec* start,
                 double max_diameter) {
  const DirectionGrid& grid = mu.grid();
  const int n = grid.dim();
  Trial t;
  t.body.emplace(wulff_shape(n, grid.nodes(), h));
  const Body& b = *t.body;
  t.scale = std::pow(b.volume(), -1.0 / n);
  t.hbar = t.scale * b.support_values();
  double diam = 0.0;
  for (Eigen::Index k = 0; k < b.vertices().cols(); ++k) diam = std::max(diam, b.vertices().col(k).norm());
  if (2.0 * diam * t.scale > max_diameter) throw GeometryError("trial body exceeds the diameter cap");

  std::vector<int> idx;
  const Vec masses = positive_masses(mu, idx);
  Mat dirs(n, static_cast<Eigen::Index>(idx.size()));
  Vec sup(static_cast<Eigen::Index>(idx.size()));
  for (std::size_t k = 0; k < idx.size(); ++k) {
    dirs.col(k) = grid.node(idx[k]);
    sup[k] = t.hbar[idx[k]];
  }
  Vec xi0 = t.scale * b.interior_point();
  if (start && ((t.hbar - grid.nodes().transpose() * *start).array() > 0.0).all()) xi0 = *start;
  t.center = optimal_center(dirs, sup, masses, grid.nodes(), t.hbar, profile, xi0);
  t.energy = t.center.energy;
  return t;
}

Vec orbit_average(const Vec& v, const DirectionGrid& grid) {
  const int ng = static_cast<int>(grid.group().size());
  Vec avg = Vec::Zero(v.size());
  for (int g = 0; g < ng; ++g) {
    const auto& perm = grid.permutation(g);
    for (Eigen::Index i = 0; i < v.size(); ++i) avg[i] += v[perm[i]];
  }
  return avg / ng;
}

double orbit_deviation(const Vec& v, const DirectionGrid& grid) {
  double r = 0.0;
  if (!grid.has_group()) return r;
  for (std::size_t g = 0; g < grid.group().size(); ++g) {
    const auto& perm = grid.permutation(static_cast<int>(g));
    for (Eigen::Index i = 0; i < v.size(); ++i) r = std::max(r, std::abs(v[perm[i]] - v[i]));
  }
  return r;
}

// Newton direction on the tangent space {S, U}^perp of the reduced Lagrangian Hessian.
Vec newton_direction(const Body& body, const CenterResult& c, const ElResidual& el, const SphericalMeasure& mu,
                     const EnergyProfile& profile, const Mat& q) {
  const Mat ut = body.normals().transpose();  // N x n
  const Vec gaps = body.support_values() - ut * c.xi;
  kernels::ProfileTerms terms;
  kernels::profile_terms(profile, gaps, terms);
  const Vec dvec = terms.d2.cwiseProduct(mu.masses());
  const Mat du = dvec.asDiagonal() * ut;
  Mat h = -el.lambda_eps * area_jacobian(body, true);
  h.diagonal() += dvec;
  const Eigen::LDLT<Mat> a(c.hessian);
  h -= du * a.solve(du.transpose());
  const double gamma = std::max(1e-300, h.diagonal().cwiseAbs().mean());
  Mat htan;
  kernels::project_tangent(h, q, gamma, htan);
  const Vec pr = el.r - q * (q.transpose() * el.r);
  const double scale = htan.diagonal().cwiseAbs().maxCoeff();
  double tau = 0.0;
  for (int attempt = 0; attempt < 30; ++attempt) {
    Mat shifted = htan;
    shifted.diagonal().array() += tau;
    const Eigen::LLT<Mat> llt(shifted);
    if (llt.info() == Eigen::Success) {
      Vec step = -llt.solve(pr);
      step -= q * (q.transpose() * step);
      if (step.allFinite() && step.dot(el.r) < 0.0) return step;
    }
    tau = tau == 0.0 ? 1e-10 * scale : tau * 10.0;
  }
  return Vec();
}

Mat tangent_constraints(const Body& body) {
  Mat c(body.num_normals(), body.dim() + 1);
  c.col(0) = body.facet_areas();
  c.rightCols(body.dim()) = body.normals().transpose();
  Eigen::HouseholderQR<Mat> qr(c);
  return qr.householderQ() * Mat::Identity(c.rows(), c.cols());
}

}  // namespace

ElResidual el_residual(const Body& body, const Vec& xi, const SphericalMeasure& mu, const EnergyProfile& profile) {
  if (body.num_normals() != mu.size()) throw InvalidArgument("body normals must be the measure grid nodes");
  if (std::abs(body.volume() - 1.0) > 1e-8) throw InvalidArgument("el_residual needs a volume-one body, got " + std::to_string(body.volume()));
  const Vec gaps = body.support_values() - body.normals().transpose() * xi;
  if (!((gaps.array() > 0.0).all())) throw GeometryError("center is not interior to the body");
  ElResidual out;
  Vec d1(gaps.size());
  for (Eigen::Index i = 0; i < gaps.size(); ++i) d1[i] = mu.masses()[i] > 0.0 ? profile.d1(gaps[i]) : 0.0;
  const Vec w = d1.cwiseProduct(mu.masses());
  out.lambda_eps = gaps.dot(w) / body.dim();
  out.r = w - out.lambda_eps * body.facet_areas();
  return out;
}

double outer_energy(const Vec& h, const SphericalMeasure& mu, const EnergyProfile& profile) {
  return make_trial(h, mu, profile, nullptr, std::numeric_limits<double>::infinity()).energy;
}

FixedEpsResult minimize_fixed_eps(const SphericalMeasure& mu, const EnergyProfile& profile, const SolveOptions& opts,
                                  const Vec& h0) {
  const DirectionGrid& grid = mu.grid();
  const int n = grid.dim();
  if (profile.dim() != n) throw InvalidArgument("profile dimension differs from the measure");
  if (!(mu.total() > 0.0)) throw InvalidArgument("measure has no mass");
  const bool invariant = mu.invariant();

  Vec h = h0.size() == 0 ? Vec::Ones(grid.size()) : h0;
  if (h.size() != grid.size()) throw InvalidArgument("initial offsets do not match the grid");
  if (invariant) h = orbit_average(h, grid);

  Trial cur = make_trial(h, mu, profile, nullptr, opts.max_diameter);
  auto normalized = [&](const Trial& t) {
    Vec hn = t.hbar;
    if (invariant) hn = orbit_average(hn, grid);
    return hn;
  };
  h = normalized(cur);
  Body body = wulff_shape(n, grid.nodes(), h);
  CenterResult center = cur.center;
  ElResidual el = el_residual(body, center.xi, mu, profile);

  StageRecord rec;
  rec.eps = profile.eps();
  std::vector<double> energies{cur.energy};
  double fval = cur.energy;
  int it = 0;
  for (; it < opts.max_iter; ++it) {
    const double res = el.r.cwiseAbs().maxCoeff() / el.lambda_eps;
    rec.residual = res;
    if (res <= opts.tol) {
      rec.converged = true;
      break;
    }
    const Mat q = tangent_constraints(body);
    const Vec pr = el.r - q * (q.transpose() * el.r);
    const double pr_norm = pr.norm();

    std::vector<Vec> directions;
    if (opts.newton) {
      Vec d = newton_direction(body, center, el, mu, profile, q);
      if (d.size() > 0) directions.push_back(invariant ? orbit_average(d, grid) : d);
    }
    directions.push_back(invariant ? Vec(-orbit_average(pr, grid)) : Vec(-pr));

    bool accepted = false;
    for (std::size_t di = 0; di < directions.size() && !accepted; ++di) {
      const Vec& d = directions[di];
      const double slope = el.r.dot(d);
      if (!(slope < 0.0)) continue;
      const bool is_newton = opts.newton && di + 1 < directions.size();
      // Newton steps move no offset by more than a fifth of the smallest gap,
      // gradient steps by at most a tenth.
      const double gmin = (h - grid.nodes().transpose() * center.xi).minCoeff();
      const double cap = (is_newton ? 0.2 : 0.1) * gmin / d.cwiseAbs().maxCoeff();
      double t = is_newton ? std::min(1.0, cap) : cap;
      for (int halving = 0; halving < 50; ++halving, t *= 0.5) {
        const Vec trial_h = h + t * d;
        try {
          Vec start = center.xi;
          Trial tr = make_trial(trial_h, mu, profile, &start, opts.max_diameter);
          bool ok = tr.energy <= fval + 1e-4 * t * slope;
          if (!ok && tr.energy <= fval) {
            // Near stationarity F differences reach rounding; accept non-increasing steps that shrink the residual.
            const Vec hn = normalized(tr);
            const Body nb = wulff_shape(n, grid.nodes(), hn);
            const ElResidual nel = el_residual(nb, tr.center.xi, mu, profile);
            const Mat nq = tangent_constraints(nb);
            ok = (nel.r - nq * (nq.transpose() * nel.r)).norm() < pr_norm;
          }
          if (!ok) continue;
          h = normalized(tr);
          body = wulff_shape(n, grid.nodes(), h);
          Vec xs = tr.center.xi;
          {
            std::vector<int> idx;
            const Vec m = positive_masses(mu, idx);
            Mat dirs(n, static_cast<Eigen::Index>(idx.size()));
            Vec sup(static_cast<Eigen::Index>(idx.size()));
            for (std::size_t k = 0; k < idx.size(); ++k) {
              dirs.col(k) = grid.node(idx[k]);
              sup[k] = body.support_values()[idx[k]];
            }
            center = optimal_center(dirs, sup, m, grid.nodes(), body.support_values(), profile, xs);
          }
          el = el_residual(body, center.xi, mu, profile);
          if (tr.energy > fval) rec.energy_monotone = false;
          fval = tr.energy;
          energies.push_back(fval);
          accepted = true;
          break;
        } catch (const GeometryError&) {
          continue;
        } catch (const ConvergenceError&) {
          continue;
        }
      }
    }
    if (!accepted) {
      rec.message = "line search failed";
      break;
    }
  }
  rec.iterations = it;
  rec.residual = el.r.cwiseAbs().maxCoeff() / el.lambda_eps;
  if (!rec.converged && rec.residual <= opts.tol) rec.converged = true;
  if (!rec.converged && rec.message.empty()) rec.message = "iteration limit reached";
  rec.lambda_eps = el.lambda_eps;
  rec.energy = fval;
  return FixedEpsResult{std::move(body), std::move(center), std::move(el), rec, std::move(energies)};
}

double rescale_factor(double lambda0, double p, int n) {
  if (!(lambda0 > 0.0)) throw InvalidArgument("lambda0 must be positive");
  if (p == 0.0) return std::pow(lambda0, 1.0 / n);
  return std::pow(lambda0 / std::abs(p), 1.0 / (n - p));
}

VerifyResult verify(const Body& body, const AtomicMeasure& mu, double p) {
  const AtomicMeasure lp = lp_surface_area_measure(body, p);
  const int n = body.dim();
  std::vector<Vec> dirs;
  std::vector<double> computed, target;
  auto slot = [&](const Vec& u) {
    for (std::size_t k = 0; k < dirs.size(); ++k)
      if ((dirs[k] - u).norm() <= 1e-9) return static_cast<int>(k);
    dirs.push_back(u);
    computed.push_back(0.0);
    target.push_back(0.0);
    return static_cast<int>(dirs.size()) - 1;
  };
  for (int i = 0; i < lp.size(); ++i) computed[slot(lp.directions.col(i))] += lp.masses[i];
  for (int a = 0; a < mu.size(); ++a) target[slot(mu.directions.col(a))] += mu.masses[a];

  VerifyResult out;
  const int m = static_cast<int>(dirs.size());
  out.directions.resize(n, m);
  out.computed.resize(m);
  out.target.resize(m);
  for (int k = 0; k < m; ++k) {
    out.directions.col(k) = dirs[k];
    out.computed[k] = computed[k];
    out.target[k] = target[k];
  }
  const double total = mu.total();
  const double peak = mu.masses.size() ? mu.masses.maxCoeff() : 0.0;
  const Vec diff = (out.computed - out.target).cwiseAbs();
  out.residual_l1 = total > 0.0 ? diff.sum() / total : diff.sum();
  out.residual_linf = peak > 0.0 ? diff.maxCoeff() / peak : diff.maxCoeff();
  return out;
}

VerifyResult verify(const Body& body, const SphericalMeasure& mu, double p) {
  return verify(body, mu.to_atomic(false), p);
}

SolveResult solve(const SphericalMeasure& mu, double p, const SolveOptions& opts) {
  const DirectionGrid& grid = mu.grid();
  const int n = grid.dim();
  if (!(p > -n && p < 1.0)) throw InvalidArgument("p must lie in (-n, 1)");
  if (!(mu.total() > 0.0)) throw InvalidArgument("measure has no mass");
  if (opts.stages < 1) throw InvalidArgument("need at least one stage");
  if (!(opts.eps0 > 0.0 && opts.eps0 < 1.0 / 3.0)) throw InvalidArgument("eps0 must lie in (0, 1/3)");

  SolveResult out;
  SolveReport& rep = out.report;
  rep.p = p;
  rep.dim = n;
  Vec h = Vec::Ones(grid.size());
  Vec prev_gaps;
  std::optional<FixedEpsResult> last;
  bool aborted = false;
  for (int k = 0; k < opts.stages; ++k) {
    const double eps = opts.eps0 * std::pow(2.0, -k);
    const EnergyProfile profile = build_profile(p, n, eps);
    FixedEpsResult res = minimize_fixed_eps(mu, profile, opts, h);
    const Vec gaps = res.body.support_values() - grid.nodes().transpose() * res.center.xi;
    if (prev_gaps.size()) {
      res.record.body_change = (gaps - prev_gaps).cwiseAbs().maxCoeff();
      if (rep.stages.size() >= 2 && res.record.body_change > rep.stages.back().body_change) rep.cauchy = false;
    }
    rep.stages.push_back(res.record);
    h = res.body.support_values();
    prev_gaps = gaps;
    last.emplace(std::move(res));
    const std::size_t s = rep.stages.size();
    if (s >= 2 && !rep.stages[s - 1].converged && !rep.stages[s - 2].converged &&
        rep.stages[s - 1].residual >= rep.stages[s - 2].residual) {
      aborted = true;
      std::ostringstream os;
      os << "residual did not decrease across two unconverged stages (" << rep.stages[s - 2].residual << " -> "
         << rep.stages[s - 1].residual << ")";
      rep.message = os.str();
      break;
    }
    if (s >= 2 && rep.stages.back().body_change < opts.body_tol) break;
  }

  const FixedEpsResult& fin = *last;
  rep.lambda0 = fin.residual.lambda_eps;
  rep.lambda = rescale_factor(rep.lambda0, p, n);
  const double eps_final = rep.stages.back().eps;
  rep.touch_threshold = opts.touch_threshold >= 0.0 ? opts.touch_threshold : 10.0 * eps_final;
  rep.min_gap = prev_gaps.minCoeff();
  for (int i = 0; i < grid.size(); ++i)
    if (prev_gaps[i] < rep.touch_threshold) rep.touch_mass += mu.masses()[i];

  Vec offsets = rep.lambda * prev_gaps;
  if (mu.invariant()) offsets = orbit_average(offsets, grid);
  out.body.emplace(wulff_shape(n, grid.nodes(), offsets));
  rep.offset_invariance = orbit_deviation(out.body->support_values(), grid);
  const VerifyResult v = verify(*out.body, mu, p);
  rep.residual_l1 = v.residual_l1;
  rep.residual_linf = v.residual_linf;
  const AtomicMeasure lp = lp_surface_area_measure(*out.body, p);
  out.residuals = lp.masses - mu.masses();
  rep.converged = !aborted && rep.stages.back().converged;
  if (rep.message.empty() && !rep.converged) rep.message = rep.stages.back().message;
  return out;
}

HemisphereResult solve_hemisphere(const AtomicMeasure& mu, double p, int resolution, int smooth_m,
                                  const SolveOptions& opts, int hemisphere_tests) {
  const int n = mu.dim;
  HemisphereSymmetrization sym = symmetrize_hemisphere(mu);
  const double open_min = min_open_hemisphere_mass(sym.mu0, hemisphere_tests);
  auto grid = std::make_shared<const DirectionGrid>(build_grid(n, resolution, sym.group()));
  SmoothingResult smooth = smooth_discrete(sym.mu0, grid, smooth_m, true);
  SolveResult sol = solve(smooth.measure, p, opts);

  const Body& m = *sol.body;
  const int k = static_cast<int>(sym.cone_normals.cols());
  Mat normals(n, m.num_normals() + k);
  Vec offsets(m.num_normals() + k);
  normals.leftCols(m.num_normals()) = m.normals();
  offsets.head(m.num_normals()) = m.support_values();
  normals.rightCols(k) = sym.cone_normals;
  offsets.tail(k).setZero();
  Body cut = wulff_shape(n, normals, offsets);
  VerifyResult ver = verify(cut, mu, p);
  return HemisphereResult{std::move(sym), smooth.cells, std::move(sol), std::move(cut), std::move(ver), open_min};
}

}  // namespace lpm
