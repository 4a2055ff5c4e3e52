#include "lpm/energy.hpp"

#include <cmath>
#include <limits>

#include "lpm/kernels.hpp"

namespace lpm {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double eval_piece(const BridgePiece& b, double t, int order) {
  const double s = t - b.a;
  switch (order) {
    case 0: return b.c0 + s * (b.c1 + s * (b.c2 + s * b.c3));
    case 1: return b.c1 + s * (2.0 * b.c2 + 3.0 * s * b.c3);
    default: return 2.0 * b.c2 + 6.0 * s * b.c3;
  }
}

// Returns an empty message when the profile passes every check.
std::string validate(const EnergyProfile& pr) {
  const double eps = pr.eps(), q = pr.q();
  auto rel = [](double a, double b) { return std::abs(a - b) / std::max(1.0, std::abs(b)); };
  // One-sided values at the joints, evaluated exactly there.
  const BridgePiece& first = pr.bridge().front();
  const BridgePiece& last = pr.bridge().back();
  if (rel(eval_piece(first, eps, 0), -std::pow(eps, -q)) > 1e-9 ||
      rel(eval_piece(first, eps, 1), q * std::pow(eps, -q - 1.0)) > 1e-9 ||
      rel(eval_piece(last, 3.0 * eps, 0), pr.phi(3.0 * eps)) > 1e-9 ||
      rel(eval_piece(last, 3.0 * eps, 1), pr.dphi(3.0 * eps)) > 1e-9)
    return "bridge is not C^1 at a joint";
  for (std::size_t k = 0; k + 1 < pr.bridge().size(); ++k) {
    const double t = pr.bridge()[k].b;
    if (rel(eval_piece(pr.bridge()[k], t, 0), eval_piece(pr.bridge()[k + 1], t, 0)) > 1e-9 ||
        rel(eval_piece(pr.bridge()[k], t, 1), eval_piece(pr.bridge()[k + 1], t, 1)) > 1e-9)
      return "bridge is not C^1 at an inner knot";
  }
  const int samples = 4000;
  for (int k = 0; k <= samples; ++k) {
    const double t = eps * (1.0 + 2.0 * k / samples);
    if (!(pr.d1(t) > 0.0)) return "bridge is not increasing";
    if (!(pr.d2(t) < 0.0)) return "bridge is not strictly concave";
    if (t < 1.0 && pr.value(t) < -std::pow(t, -q) * (1.0 + 1e-12)) return "bridge dips below -t^{-q}";
  }
  return {};
}

}  // namespace

const BridgePiece* EnergyProfile::piece(double t) const {
  for (const auto& b : pieces_)
    if (t <= b.b) return &b;
  return &pieces_.back();
}

double EnergyProfile::phi(double t) const {
  if (t <= 0.0) return -kInf;
  if (p_ > 0.0) return std::pow(t, p_);
  if (p_ == 0.0) return std::log(t);
  return -std::pow(t, p_);
}

double EnergyProfile::dphi(double t) const {
  if (t <= 0.0) return kInf;
  if (p_ == 0.0) return 1.0 / t;
  return std::abs(p_) * std::pow(t, p_ - 1.0);
}

double EnergyProfile::d2phi(double t) const {
  if (t <= 0.0) return -kInf;
  if (p_ == 0.0) return -1.0 / (t * t);
  return std::abs(p_) * (p_ - 1.0) * std::pow(t, p_ - 2.0);
}

double EnergyProfile::value(double t) const {
  if (t <= 0.0) return -kInf;
  if (is_phi_ || t >= 3.0 * eps_) return phi(t);
  if (t <= eps_) return -std::pow(t, -q_);
  return eval_piece(*piece(t), t, 0);
}

double EnergyProfile::d1(double t) const {
  if (t <= 0.0) return kInf;
  if (is_phi_ || t >= 3.0 * eps_) return dphi(t);
  if (t <= eps_) return q_ * std::pow(t, -q_ - 1.0);
  return eval_piece(*piece(t), t, 1);
}

double EnergyProfile::d2(double t) const {
  if (t <= 0.0) return -kInf;
  if (is_phi_ || t >= 3.0 * eps_) return d2phi(t);
  if (t <= eps_) return -q_ * (q_ + 1.0) * std::pow(t, -q_ - 2.0);
  return eval_piece(*piece(t), t, 2);
}

EnergyProfile build_profile(double p, int n, double eps) {
  if (n < 2) throw InvalidArgument("dimension must be at least 2");
  if (!(p > -n && p < 1.0)) throw InvalidArgument("p must lie in (-n, 1)");
  if (!(eps > 0.0 && eps < 1.0 / 3.0)) throw InvalidArgument("eps must lie in (0, 1/3)");

  EnergyProfile pr;
  pr.p_ = p;
  pr.dim_ = n;
  pr.eps_ = eps;
  pr.q_ = std::max(std::abs(p), n - 1.0);
  if (p <= -(n - 1.0)) {
    pr.is_phi_ = true;
    pr.kind_ = "none";
    return pr;
  }

  const double q = pr.q_;
  const double len = 2.0 * eps;
  const double y0 = -std::pow(eps, -q), s0 = q * std::pow(eps, -q - 1.0);
  const double y1 = pr.phi(3.0 * eps), s1 = pr.dphi(3.0 * eps);
  const double delta = (y1 - y0) / len;

  std::vector<std::pair<std::string, std::vector<BridgePiece>>> candidates;
  {
    BridgePiece b{eps, 3.0 * eps, y0, s0, (3.0 * delta - 2.0 * s0 - s1) / len,
                  (s0 + s1 - 2.0 * delta) / (len * len)};
    candidates.push_back({"cubic", {b}});
  }
  // C^1 piecewise quadratic: slope linear from s0 to sk on [0, a L], then to s1.
  auto quadratic = [&](double alpha) {
    const double sk = 2.0 * delta - alpha * s0 - (1.0 - alpha) * s1;
    const double l1 = alpha * len, l2 = (1.0 - alpha) * len;
    BridgePiece b1{eps, eps + l1, y0, s0, (sk - s0) / (2.0 * l1), 0.0};
    BridgePiece b2{eps + l1, 3.0 * eps, y0 + 0.5 * l1 * (s0 + sk), sk, (s1 - sk) / (2.0 * l2), 0.0};
    return std::vector<BridgePiece>{b1, b2};
  };
  candidates.push_back({"quadratic-mid", quadratic(0.5)});
  if (s0 > delta && delta > s1) candidates.push_back({"quadratic-adaptive", quadratic((delta - s1) / (s0 - s1))});

  std::string last;
  for (auto& [kind, pieces] : candidates) {
    pr.kind_ = kind;
    pr.pieces_ = pieces;
    last = validate(pr);
    if (last.empty()) return pr;
  }
  throw Error("no admissible bridge for p = " + std::to_string(p) + ", eps = " + std::to_string(eps) + ": " + last);
}

namespace {

struct CenterEval {
  double value = 0.0;
  Vec grad;
  Mat hess;
};

bool interior(const Mat& normals, const Vec& hbar, const Vec& xi) {
  return ((hbar - normals.transpose() * xi).array() > 0.0).all();
}

CenterEval evaluate(const Mat& dirs, const Vec& support, const Vec& masses, const EnergyProfile& pr,
                    const Vec& xi, bool with_hessian) {
  const Vec gaps = support - dirs.transpose() * xi;
  kernels::ProfileTerms t;
  kernels::profile_terms(pr, gaps, t);
  CenterEval e;
  e.value = t.value.dot(masses);
  const Vec w1 = t.d1.cwiseProduct(masses);
  e.grad = -(dirs * w1);
  if (with_hessian) e.hess = dirs * t.d2.cwiseProduct(masses).asDiagonal() * dirs.transpose();
  return e;
}

void positive_atoms(const AtomicMeasure& mu, const Body& body, Mat& dirs, Vec& support_vals, Vec& masses) {
  int k = 0;
  for (int a = 0; a < mu.size(); ++a) k += mu.masses[a] > 0.0;
  dirs.resize(mu.dim, k);
  masses.resize(k);
  k = 0;
  for (int a = 0; a < mu.size(); ++a)
    if (mu.masses[a] > 0.0) {
      dirs.col(k) = mu.directions.col(a);
      masses[k++] = mu.masses[a];
    }
  support_vals = support(body, dirs);
}

}  // namespace

double energy(const Body& body, const Vec& xi, const AtomicMeasure& mu, const EnergyProfile& profile) {
  if (!interior(body.normals(), body.support_values(), xi)) throw GeometryError("center is not interior to the body");
  Mat dirs;
  Vec h, m;
  positive_atoms(mu, body, dirs, h, m);
  return evaluate(dirs, h, m, profile, xi, false).value;
}

double energy(const Body& body, const Vec& xi, const SphericalMeasure& mu, const EnergyProfile& profile) {
  return energy(body, xi, mu.to_atomic(true), profile);
}

Vec center_gradient(const Body& body, const Vec& xi, const AtomicMeasure& mu, const EnergyProfile& profile) {
  if (!interior(body.normals(), body.support_values(), xi)) throw GeometryError("center is not interior to the body");
  Mat dirs;
  Vec h, m;
  positive_atoms(mu, body, dirs, h, m);
  return evaluate(dirs, h, m, profile, xi, false).grad;
}

CenterResult optimal_center(const Mat& directions, const Vec& support_vals, const Vec& masses,
                            const Mat& normals, const Vec& hbar, const EnergyProfile& profile,
                            const Vec& start) {
  if (!interior(normals, hbar, start)) throw GeometryError("initial center is not interior");
  const double mass = masses.sum();
  if (!(mass > 0.0)) throw InvalidArgument("measure has no mass");
  const double target = 1e-10 * mass;

  Vec xi = start;
  CenterEval cur = evaluate(directions, support_vals, masses, profile, xi, true);
  CenterResult res;
  int it = 0;
  for (; it < 200 && cur.grad.norm() > target; ++it) {
    const Eigen::LDLT<Mat> ldlt(-cur.hess);
    Vec step = ldlt.solve(cur.grad);
    if (!step.allFinite() || step.dot(cur.grad) <= 0.0) step = cur.grad / std::max(1.0, -cur.hess.trace());
    bool accepted = false;
    double t = 1.0;
    for (int halving = 0; halving <= 100; ++halving, t *= 0.5) {
      const Vec cand = xi + t * step;
      if (!interior(normals, hbar, cand)) continue;
      CenterEval next = evaluate(directions, support_vals, masses, profile, cand, true);
      if (next.value > cur.value || next.grad.norm() < cur.grad.norm()) {
        xi = cand;
        cur = std::move(next);
        accepted = true;
        break;
      }
    }
    if (!accepted) break;
  }
  res.xi = xi;
  res.grad_norm = cur.grad.norm();
  res.hessian = cur.hess;
  res.energy = cur.value;
  res.iterations = it;
  if (!(res.grad_norm <= target))
    throw ConvergenceError("optimal center: gradient norm " + std::to_string(res.grad_norm) +
                           " above target " + std::to_string(target));
  return res;
}

CenterResult optimal_center(const Body& body, const AtomicMeasure& mu, const EnergyProfile& profile) {
  Mat dirs;
  Vec h, m;
  positive_atoms(mu, body, dirs, h, m);
  return optimal_center(dirs, h, m, body.normals(), body.support_values(), profile, body.interior_point());
}

CenterResult optimal_center(const Body& body, const SphericalMeasure& mu, const EnergyProfile& profile) {
  return optimal_center(body, mu.to_atomic(true), profile);
}

}  // namespace lpm
