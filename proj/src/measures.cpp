#include "lpm/measures.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>

#include "lpm/linprog.hpp"

namespace lpm {

SphericalMeasure::SphericalMeasure(GridPtr grid, Vec masses,
                                   std::optional<std::pair<double, double>> density_bounds, bool invariant)
    : grid_(std::move(grid)), masses_(std::move(masses)), density_bounds_(density_bounds), invariant_(invariant) {
  if (!grid_) throw InvalidArgument("measure needs a grid");
  if (masses_.size() != grid_->size()) throw InvalidArgument("mass vector does not match grid size");
  for (Eigen::Index i = 0; i < masses_.size(); ++i)
    if (!std::isfinite(masses_[i]) || masses_[i] < 0.0) throw InvalidArgument("masses must be finite and nonnegative");
  if (density_bounds_) {
    const auto [lo, hi] = *density_bounds_;
    for (int i = 0; i < grid_->size(); ++i) {
      const double w = grid_->weight(i);
      if (masses_[i] < lo * w * (1.0 - 1e-12) || masses_[i] > hi * w * (1.0 + 1e-12))
        throw InvalidArgument("masses violate the recorded density bounds");
    }
  }
  if (invariant_) {
    if (!grid_->has_group()) throw InvalidArgument("invariant measure needs a grid with a group");
    if (orbit_residual() > 1e-8 * std::max(1.0, masses_.cwiseAbs().maxCoeff()))
      throw InvalidArgument("measure is not invariant under the grid group");
  }
}

double SphericalMeasure::orbit_residual() const {
  double r = 0.0;
  if (!grid_->has_group()) return r;
  for (std::size_t g = 0; g < grid_->group().size(); ++g) {
    const auto& perm = grid_->permutation(static_cast<int>(g));
    for (int i = 0; i < size(); ++i) r = std::max(r, std::abs(masses_[perm[i]] - masses_[i]));
  }
  return r;
}

AtomicMeasure SphericalMeasure::to_atomic(bool drop_zero) const {
  AtomicMeasure a;
  a.dim = dim();
  std::vector<int> keep;
  for (int i = 0; i < size(); ++i)
    if (!drop_zero || masses_[i] > 0.0) keep.push_back(i);
  a.directions.resize(dim(), static_cast<Eigen::Index>(keep.size()));
  a.masses.resize(static_cast<Eigen::Index>(keep.size()));
  for (std::size_t k = 0; k < keep.size(); ++k) {
    a.directions.col(k) = grid_->node(keep[k]);
    a.masses[k] = masses_[keep[k]];
  }
  return a;
}

SphericalMeasure density_measure(const Density& f, GridPtr grid, bool invariant) {
  if (!grid) throw InvalidArgument("density_measure needs a grid");
  const int n = grid->size();
  Vec vals(n);
  for (int i = 0; i < n; ++i) {
    vals[i] = f(grid->node(i));
    if (!std::isfinite(vals[i]) || vals[i] < 0.0) throw InvalidArgument("density must be finite and nonnegative");
  }
  if (invariant) {
    if (!grid->has_group()) throw InvalidArgument("invariant density needs a grid with a group");
    const int ng = static_cast<int>(grid->group().size());
    Vec avg = Vec::Zero(n);
    for (int g = 0; g < ng; ++g) {
      const auto& perm = grid->permutation(g);
      for (int i = 0; i < n; ++i) avg[i] += vals[perm[i]];
    }
    vals = avg / ng;
  }
  if (!(vals.maxCoeff() > 0.0)) throw InvalidArgument("density vanishes on every grid node");
  std::optional<std::pair<double, double>> bounds;
  if (vals.minCoeff() > 0.0) bounds = std::make_pair(vals.minCoeff(), vals.maxCoeff());
  Vec masses = vals.cwiseProduct(grid->weights());
  return SphericalMeasure(std::move(grid), std::move(masses), bounds, invariant);
}

Density truncate_density(Density f, int m) {
  if (m < 2) throw InvalidArgument("truncation level must be at least 2");
  const double hi = m, lo = 1.0 / m;
  return [f = std::move(f), lo, hi](const Vec& u) {
    const double v = f(u);
    if (v >= hi) return hi;
    if (v <= lo) return lo;
    return v;
  };
}

namespace {

// Orbit-quotient angular distance between directions a and b.
double quotient_angle(const Vec& a, const Vec& b, const Group* group) {
  if (!group) return angle_between(a, b);
  double best = angle_between(a, b);
  for (const auto& g : *group) best = std::min(best, angle_between(a, g * b));
  return best;
}

// Nearest center in quotient distance; ties go to the lowest index.
int nearest_center(const Vec& u, const std::vector<Vec>& centers, const Group* group) {
  int best = 0;
  double best_d = std::numeric_limits<double>::infinity();
  for (std::size_t c = 0; c < centers.size(); ++c) {
    const double d = quotient_angle(u, centers[c], group);
    if (d < best_d - 1e-12) {
      best_d = d;
      best = static_cast<int>(c);
    }
  }
  return best;
}

}  // namespace

SmoothingResult smooth_discrete(const AtomicMeasure& mu, GridPtr grid, int m, bool invariant) {
  if (!grid) throw InvalidArgument("smooth_discrete needs a grid");
  if (m < 1) throw InvalidArgument("smoothing resolution must be positive");
  if (mu.dim != grid->dim()) throw InvalidArgument("measure and grid dimensions differ");
  if (!(mu.total() > 0.0)) throw InvalidArgument("measure to smooth has no mass");
  if (invariant && !grid->has_group()) throw InvalidArgument("invariant smoothing needs a grid with a group");
  const Group* group = invariant ? &grid->group() : nullptr;
  const double radius = 1.0 / m;

  std::vector<Vec> centers;
  std::vector<int> center_nodes;
  for (int i = 0; i < grid->size(); ++i) {
    const Vec u = grid->node(i);
    bool covered = false;
    for (const auto& c : centers)
      if (quotient_angle(u, c, group) <= radius) {
        covered = true;
        break;
      }
    if (!covered) {
      centers.push_back(u);
      center_nodes.push_back(i);
    }
  }
  const int cells = static_cast<int>(centers.size());

  std::vector<int> cell_of(grid->size());
  Vec cell_area = Vec::Zero(cells);
  for (int i = 0; i < grid->size(); ++i) {
    cell_of[i] = nearest_center(grid->node(i), centers, group);
    cell_area[cell_of[i]] += grid->weight(i);
  }
  Vec cell_mass = Vec::Zero(cells);
  for (int a = 0; a < mu.size(); ++a) {
    if (mu.masses[a] == 0.0) continue;
    cell_mass[nearest_center(mu.directions.col(a), centers, group)] += mu.masses[a];
  }

  const double floor = 1.0 / (static_cast<double>(cells) * cells);
  Vec density(grid->size());
  for (int i = 0; i < grid->size(); ++i) density[i] = cell_mass[cell_of[i]] / cell_area[cell_of[i]] + floor;
  if (invariant) {
    // Cells are orbit unions, so the density is invariant up to rounding; symmetrize it exactly.
    const int ng = static_cast<int>(group->size());
    Vec avg = Vec::Zero(grid->size());
    for (int g = 0; g < ng; ++g) {
      const auto& perm = grid->permutation(g);
      for (int i = 0; i < grid->size(); ++i) avg[i] += density[perm[i]];
    }
    density = avg / ng;
  }
  Vec masses = density.cwiseProduct(grid->weights());
  auto bounds = std::make_pair(density.minCoeff(), density.maxCoeff());
  SmoothingResult res{SphericalMeasure(grid, std::move(masses), bounds, invariant), cells, std::move(center_nodes),
                      std::move(cell_of), std::move(cell_mass), std::move(cell_area)};
  return res;
}

Mat span_basis(const Mat& vectors, double tol) {
  if (vectors.cols() == 0) return Mat(vectors.rows(), 0);
  Eigen::JacobiSVD<Mat> svd(vectors, Eigen::ComputeFullU);
  const Vec& s = svd.singularValues();
  int rank = 0;
  const double cut = tol * std::max(1.0, s[0]);
  for (Eigen::Index k = 0; k < s.size(); ++k) rank += s[k] > cut;
  return svd.matrixU().leftCols(rank);
}

namespace {

struct Support {
  Mat dirs;    // distinct directions with positive mass
  Vec masses;
};

Support distinct_support(const AtomicMeasure& mu, double tol) {
  std::vector<Vec> dirs;
  std::vector<double> masses;
  for (int a = 0; a < mu.size(); ++a) {
    if (!(mu.masses[a] > 0.0)) continue;
    const Vec u = mu.directions.col(a).normalized();
    bool merged = false;
    for (std::size_t k = 0; k < dirs.size(); ++k)
      if ((dirs[k] - u).norm() <= tol) {
        masses[k] += mu.masses[a];
        merged = true;
        break;
      }
    if (!merged) {
      dirs.push_back(u);
      masses.push_back(mu.masses[a]);
    }
  }
  Support s{Mat(mu.dim, static_cast<Eigen::Index>(dirs.size())), Vec(static_cast<Eigen::Index>(dirs.size()))};
  for (std::size_t k = 0; k < dirs.size(); ++k) {
    s.dirs.col(k) = dirs[k];
    s.masses[k] = masses[k];
  }
  return s;
}

// max sum_a <w, u_a> subject to <w, u_a> >= 0, w = B c, |c_k| <= 1; > 0 iff pos supp != lin supp.
double half_space_lp(const Mat& dirs, const Mat& basis) {
  const int k = static_cast<int>(basis.cols());
  const int na = static_cast<int>(dirs.cols());
  const Mat g = dirs.transpose() * basis;  // na x k
  Mat a(na + 2 * k, k);
  Vec b = Vec::Zero(na + 2 * k);
  a.topRows(na) = -g;
  a.middleRows(na, k) = Mat::Identity(k, k);
  a.bottomRows(k) = -Mat::Identity(k, k);
  b.tail(2 * k).setOnes();
  const Vec c = g.colwise().sum().transpose();
  const LpResult r = maximize(c, a, b);
  return r.optimal() ? r.value : 0.0;
}

// Strict positive combination test: max s with v = sum lambda_a u_a, lambda_a >= s, s <= 1.
double relint_margin(const Mat& dirs, const Vec& v) {
  const int na = static_cast<int>(dirs.cols());
  const int n = static_cast<int>(dirs.rows());
  // variables (lambda_1..lambda_na, s)
  Mat a = Mat::Zero(2 * n + na + 1, na + 1);
  Vec b = Vec::Zero(2 * n + na + 1);
  a.block(0, 0, n, na) = dirs;
  b.head(n) = v;
  a.block(n, 0, n, na) = -dirs;
  b.segment(n, n) = -v;
  for (int i = 0; i < na; ++i) {
    a(2 * n + i, i) = -1.0;
    a(2 * n + i, na) = 1.0;
  }
  a(2 * n + na, na) = 1.0;
  b[2 * n + na] = 1.0;
  Vec c = Vec::Zero(na + 1);
  c[na] = 1.0;
  const LpResult r = maximize(c, a, b);
  if (!r.optimal()) return -1.0;
  // Equality rows may be slightly violated by the simplex; confirm the combination.
  const Vec lam = r.x.head(na);
  if ((dirs * lam - v).norm() > 1e-8 * std::max(1.0, v.norm())) return -1.0;
  return r.value;
}

// A point of relint C in the dual cone: v = sum lambda u, lambda_a >= s, <u_b, v> >= 0, sum lambda <= 1.
Vec dual_relint_point(const Mat& dirs) {
  const int na = static_cast<int>(dirs.cols());
  const Mat gram = dirs.transpose() * dirs;
  Mat a = Mat::Zero(2 * na + 1, na + 1);
  Vec b = Vec::Zero(2 * na + 1);
  a.block(0, 0, na, na) = -gram;
  for (int i = 0; i < na; ++i) {
    a(na + i, i) = -1.0;
    a(na + i, na) = 1.0;
  }
  a.block(2 * na, 0, 1, na).setOnes();
  b[2 * na] = 1.0;
  Vec c = Vec::Zero(na + 1);
  c[na] = 1.0;
  const LpResult r = maximize(c, a, b);
  if (!r.optimal() || r.value <= 1e-12) throw HypothesisError("no point of relint pos supp mu in its dual cone");
  return dirs * r.x.head(na);
}

}  // namespace

PositiveHullReport positive_hull_check(const AtomicMeasure& mu, double tol) {
  PositiveHullReport rep;
  const Support s = distinct_support(mu, tol);
  if (s.dirs.cols() == 0) {
    rep.message = "measure has empty support";
    return rep;
  }
  const Mat basis = span_basis(s.dirs, tol);
  rep.lin_dim = static_cast<int>(basis.cols());
  rep.pos_equals_lin = half_space_lp(s.dirs, basis) <= tol;
  rep.antipodal_pair = s.dirs.cols() == 2 && (s.dirs.col(0) + s.dirs.col(1)).norm() <= tol;
  rep.passes = rep.lin_dim == mu.dim || !rep.pos_equals_lin;
  if (rep.antipodal_pair) {
    rep.message = "antipodal pair";
  } else if (rep.passes) {
    rep.message = rep.lin_dim == mu.dim ? "support spans R^n" : "pos supp differs from lin supp";
  } else {
    rep.message = "pos supp equals lin supp in a proper subspace";
  }
  return rep;
}

Group HemisphereSymmetrization::group() const {
  Group g;
  Mat power = Mat::Identity(rotation.rows(), rotation.cols());
  for (int i = 0; i <= d; ++i) {
    g.push_back(power);
    power = rotation * power;
  }
  return g;
}

HemisphereSymmetrization symmetrize_hemisphere(const AtomicMeasure& mu) {
  const int n = mu.dim;
  const double tol = 1e-9;
  const Support s = distinct_support(mu, tol);
  if (s.dirs.cols() == 0) throw InvalidArgument("measure has empty support");
  HemisphereSymmetrization out;
  out.lin_basis = span_basis(s.dirs, tol);
  const int k = static_cast<int>(out.lin_basis.cols());
  if (half_space_lp(s.dirs, out.lin_basis) <= tol)
    throw HypothesisError("pos supp mu equals lin supp mu; hemisphere symmetrization needs a proper cone");

  // Max-min direction: maximize t with <u_a, B c> >= t, |c| <= 1 in a box.
  const int na = static_cast<int>(s.dirs.cols());
  const Mat g = s.dirs.transpose() * out.lin_basis;
  Mat a = Mat::Zero(na + 2 * k + 1, k + 1);
  Vec b = Vec::Zero(na + 2 * k + 1);
  a.block(0, 0, na, k) = -g;
  a.block(0, k, na, 1).setOnes();
  a.block(na, 0, k, k) = Mat::Identity(k, k);
  a.block(na + k, 0, k, k) = -Mat::Identity(k, k);
  b.segment(na, 2 * k).setOnes();
  a(na + 2 * k, k) = 1.0;
  b[na + 2 * k] = 1.0;
  Vec c = Vec::Zero(k + 1);
  c[k] = 1.0;
  const LpResult r = maximize(c, a, b);
  Vec v;
  if (r.optimal() && r.value > tol) v = out.lin_basis * r.x.head(k);
  if (v.size() == 0 || v.norm() <= tol || relint_margin(s.dirs, v / v.norm()) <= 1e-12) v = dual_relint_point(s.dirs);
  out.v0 = v.normalized();

  // Ltilde = L cap v0^perp.
  const Mat proj = Mat::Identity(n, n) - out.v0 * out.v0.transpose();
  out.ltilde_basis = span_basis(proj * out.lin_basis, tol);
  out.d = n - static_cast<int>(out.ltilde_basis.cols());
  const int d = out.d;

  // Orthonormal frame E of Ltilde^perp seeded by v0.
  std::vector<Vec> frame{out.v0};
  for (int j = 0; j < n && static_cast<int>(frame.size()) < d; ++j) {
    Vec e = Vec::Unit(n, j);
    e -= out.ltilde_basis * (out.ltilde_basis.transpose() * e);
    for (const auto& f : frame) e -= f.dot(e) * f;
    if (e.norm() > 1e-6) frame.push_back(e.normalized());
  }
  if (static_cast<int>(frame.size()) != d) throw Error("simplex frame construction failed");
  Mat e(n, d);
  for (int j = 0; j < d; ++j) e.col(j) = frame[j];

  // Regular simplex: centered standard basis of R^{d+1}, in a frame F of the sum-zero hyperplane with F^T w_0 = e_1.
  Mat w = Mat::Identity(d + 1, d + 1) - Mat::Constant(d + 1, d + 1, 1.0 / (d + 1));
  for (int i = 0; i <= d; ++i) w.col(i).normalize();
  std::vector<Vec> hyper{w.col(0)};
  for (int j = 1; j <= d && static_cast<int>(hyper.size()) < d; ++j) {
    Vec x = w.col(j);
    for (const auto& f : hyper) x -= f.dot(x) * f;
    if (x.norm() > 1e-9) hyper.push_back(x.normalized());
  }
  Mat f(d + 1, d);
  for (int j = 0; j < d; ++j) f.col(j) = hyper[j];
  out.simplex = e * (f.transpose() * w);
  Mat perm = Mat::Zero(d + 1, d + 1);
  for (int i = 0; i <= d; ++i) perm((i + 1) % (d + 1), i) = 1.0;
  out.rotation = e * (f.transpose() * perm * f) * e.transpose() + out.ltilde_basis * out.ltilde_basis.transpose();

  // mu0 = sum_i A^i mu.
  const Group grp = out.group();
  out.mu0.dim = n;
  out.mu0.directions.resize(n, mu.size() * (d + 1));
  out.mu0.masses.resize(mu.size() * (d + 1));
  for (int i = 0; i <= d; ++i) {
    out.mu0.directions.middleCols(i * mu.size(), mu.size()) = grp[i] * mu.directions;
    out.mu0.masses.segment(i * mu.size(), mu.size()) = mu.masses;
  }

  out.cone_normals.resize(n, d);
  for (int j = 1; j <= d; ++j) out.cone_normals.col(j - 1) = (out.simplex.col(j) - out.simplex.col(0)).normalized();
  return out;
}

SubspaceReport subspace_concentration_check(const AtomicMeasure& mu, double tol) {
  SubspaceReport rep;
  const int n = mu.dim;
  const Support s = distinct_support(mu, 1e-12);
  const int na = static_cast<int>(s.dirs.cols());
  const double total = s.masses.sum();
  if (!(total > 0.0)) return rep;

  // Candidate proper subspaces spanned by atoms, deduplicated by their projector.
  std::vector<Mat> candidates;
  std::vector<Mat> projectors;
  auto add = [&](const Mat& vecs) {
    const Mat basis = span_basis(vecs, 1e-9);
    if (basis.cols() == 0 || basis.cols() >= n) return;
    const Mat pr = basis * basis.transpose();
    for (const auto& q : projectors)
      if ((q - pr).norm() <= 1e-9) return;
    projectors.push_back(pr);
    candidates.push_back(basis);
  };
  for (int i = 0; i < na; ++i) add(s.dirs.col(i));
  if (n == 3)
    for (int i = 0; i < na; ++i)
      for (int j = i + 1; j < na; ++j) {
        Mat v(n, 2);
        v << s.dirs.col(i), s.dirs.col(j);
        add(v);
      }

  rep.worst_excess = -std::numeric_limits<double>::infinity();
  for (std::size_t c = 0; c < candidates.size(); ++c) {
    const Mat& basis = candidates[c];
    const int dim = static_cast<int>(basis.cols());
    double mass = 0.0;
    std::vector<int> rest;
    for (int a = 0; a < na; ++a) {
      const Vec u = s.dirs.col(a);
      if ((u - projectors[c] * u).norm() <= 1e-9) {
        mass += s.masses[a];
      } else {
        rest.push_back(a);
      }
    }
    const double ratio = mass / total;
    const double excess = ratio - static_cast<double>(dim) / n;
    rep.worst_excess = std::max(rep.worst_excess, excess);
    if (excess < -tol) continue;
    SubspaceWitness w;
    w.basis = basis;
    w.dim = dim;
    w.mass = mass;
    w.ratio = ratio;
    w.equality = std::abs(excess) <= tol;
    if (w.equality) {
      Mat rv(n, static_cast<Eigen::Index>(rest.size()));
      for (std::size_t k = 0; k < rest.size(); ++k) rv.col(k) = s.dirs.col(rest[k]);
      const int rest_dim = static_cast<int>(span_basis(rv, 1e-9).cols());
      Mat joint(n, dim + rv.cols());
      joint << basis, rv;
      w.complement = static_cast<int>(span_basis(joint, 1e-9).cols()) == dim + rest_dim;
      rep.equality = true;
      if (!w.complement) rep.satisfied = false;
    } else {
      rep.satisfied = false;
    }
    rep.witnesses.push_back(std::move(w));
  }
  if (candidates.empty()) rep.worst_excess = 0.0;
  return rep;
}

double min_open_hemisphere_mass(const AtomicMeasure& mu, int samples) {
  if (samples < 1) throw InvalidArgument("need at least one test direction");
  double best = std::numeric_limits<double>::infinity();
  for (int k = 0; k < samples; ++k) {
    Vec w(mu.dim);
    if (mu.dim == 2) {
      const double t = 2.0 * std::numbers::pi * k / samples;
      w << std::cos(t), std::sin(t);
    } else {
      const double z = 1.0 - (2.0 * k + 1.0) / samples;
      const double r = std::sqrt(std::max(0.0, 1.0 - z * z));
      const double phi = k * std::numbers::pi * (3.0 - std::sqrt(5.0));
      w << r * std::cos(phi), r * std::sin(phi), z;
    }
    double mass = 0.0;
    for (int a = 0; a < mu.size(); ++a)
      if (mu.directions.col(a).dot(w) > 1e-12) mass += mu.masses[a];
    best = std::min(best, mass);
  }
  return best;
}

}  // namespace lpm
