#pragma once

#include <optional>
#include <string>
#include <vector>

#include "lpm/energy.hpp"
#include "lpm/geometry.hpp"
#include "lpm/measures.hpp"

namespace lpm {

struct SolveOptions {
  double tol = 1e-6;             // stationarity: max |r_i| <= tol * lambda_eps
  int max_iter = 5000;           // per stage
  double eps0 = 0.1;
  int stages = 6;
  double body_tol = 1e-5;        // early stop on sup-norm change of centered offsets
  double touch_threshold = -1.0; // negative: 10 * final eps
  double max_diameter = 1e4;     // trial bodies larger than this are rejected
  bool newton = true;            // false: plain projected gradient steps
  unsigned seed = 0;             // recorded only; the solver is deterministic
};

struct StageRecord {
  double eps = 0.0;
  int iterations = 0;
  double residual = 0.0;         // max_i |r_i| / lambda_eps
  double lambda_eps = 0.0;
  double energy = 0.0;
  double body_change = 0.0;      // vs previous stage, centered offsets
  bool converged = false;
  bool energy_monotone = true;
  std::string message;
};

struct ElResidual {
  Vec r;
  double lambda_eps = 0.0;
};

/// r_i = phi_eps'(hbar_i - <u_i, xi>) mu_i - lambda_eps S_i with
/// lambda_eps = (1/n) sum_i g_i phi_eps'(g_i) mu_i. Body normals must be the measure's grid nodes.
ElResidual el_residual(const Body& body, const Vec& xi, const SphericalMeasure& mu, const EnergyProfile& profile);

/// F(h) = Phi_eps(V^{-1/n} W(h), xi) on grid normals; throws GeometryError if W(h) is not a body.
double outer_energy(const Vec& h, const SphericalMeasure& mu, const EnergyProfile& profile);

struct FixedEpsResult {
  Body body;                     // volume one
  CenterResult center;
  ElResidual residual;
  StageRecord record;
  std::vector<double> energies;  // F at every accepted iterate
};

/// Minimizes F over volume-one Wulff shapes on the measure's grid, starting
/// from offsets h0 (h = 1 if empty). Orbit-averages the step for invariant measures.
FixedEpsResult minimize_fixed_eps(const SphericalMeasure& mu, const EnergyProfile& profile, const SolveOptions& opts,
                                  const Vec& h0 = Vec());

struct SolveReport {
  double p = 0.0;
  int dim = 0;
  std::vector<StageRecord> stages;
  double lambda0 = 0.0;
  double lambda = 0.0;
  double touch_threshold = 0.0;
  double touch_mass = 0.0;
  double residual_l1 = 0.0;
  double residual_linf = 0.0;
  double min_gap = 0.0;          // smallest support value of K_0 - xi
  double offset_invariance = 0.0;// max orbit deviation of the output offsets (0 without group)
  bool converged = false;
  bool cauchy = true;            // stage-to-stage body changes were decreasing
  std::string message;
};

struct SolveResult {
  std::optional<Body> body;      // M, empty if no stage produced a body
  SolveReport report;
  Vec residuals;                 // per grid node: S_{M,p}(u_i) - mu_i
};

/// eps-continuation, lambda rescale and verification. Never throws on
/// non-convergence; report.converged is false and report.message explains.
SolveResult solve(const SphericalMeasure& mu, double p, const SolveOptions& opts = {});

struct VerifyResult {
  double residual_l1 = 0.0;      // sum |S_{M,p} - mu| / mu(S^{n-1})
  double residual_linf = 0.0;    // max |S_{M,p} - mu| / max mu
  Mat directions;
  Vec computed;
  Vec target;
};

/// Compares S_{M,p} with mu direction by direction; directions of M and of the
/// atoms are matched within 1e-9, unmatched ones count against the other side.
VerifyResult verify(const Body& body, const AtomicMeasure& mu, double p);
VerifyResult verify(const Body& body, const SphericalMeasure& mu, double p);

struct HemisphereResult {
  HemisphereSymmetrization symmetrization;
  int cells = 0;                     // smoothing cells on the orbit quotient
  SolveResult solution;              // solve on the smoothed mu0
  std::optional<Body> restricted;    // M cap D(v0)
  VerifyResult verification;         // restricted body against the original mu
  double min_open_hemisphere = 0.0;  // smallest open-hemisphere mass of mu0
};

/// Symmetrize mu, smooth mu0 on an invariant grid, solve, cut with D(v0) and
/// compare the L_p measure of the cut body with mu.
HemisphereResult solve_hemisphere(const AtomicMeasure& mu, double p, int resolution, int smooth_m,
                                  const SolveOptions& opts = {}, int hemisphere_tests = 360);

/// lambda = (lambda0 / |p|)^{1/(n-p)} for p != 0, lambda0^{1/n} for p = 0.
double rescale_factor(double lambda0, double p, int n);

}  // namespace lpm
