#include "lpm/io.hpp"

#include <fstream>
#include <iomanip>
#include <sstream>

namespace lpm::io {

json to_json(const Vec& v) {
  json j = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) j.push_back(v[i]);
  return j;
}

json to_json(const Mat& m) {
  json j = json::array();
  for (Eigen::Index c = 0; c < m.cols(); ++c) j.push_back(to_json(Vec(m.col(c))));
  return j;
}

json rows_to_json(const Mat& m) {
  json j = json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) j.push_back(to_json(Vec(m.row(r).transpose())));
  return j;
}

Vec vec_from_json(const json& j) {
  if (!j.is_array()) throw InvalidArgument("expected a list of numbers");
  Vec v(static_cast<Eigen::Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) {
    if (!j[i].is_number()) throw InvalidArgument("expected a list of numbers");
    v[static_cast<Eigen::Index>(i)] = j[i].get<double>();
  }
  return v;
}

Mat columns_from_json(const json& j) {
  if (!j.is_array() || j.empty()) throw InvalidArgument("expected a nonempty list of vectors");
  const Vec first = vec_from_json(j[0]);
  Mat m(first.size(), static_cast<Eigen::Index>(j.size()));
  for (std::size_t c = 0; c < j.size(); ++c) {
    const Vec v = vec_from_json(j[c]);
    if (v.size() != first.size()) throw InvalidArgument("vectors have different lengths");
    m.col(static_cast<Eigen::Index>(c)) = v;
  }
  return m;
}

Mat matrix_from_rows(const json& j) {
  const Mat cols = columns_from_json(j);
  if (cols.rows() != cols.cols()) throw InvalidArgument("expected a square matrix");
  return cols.transpose();
}

json grid_to_json(const DirectionGrid& grid) {
  return {{"dim", grid.dim()}, {"nodes", to_json(grid.nodes())}, {"weights", to_json(grid.weights())}};
}

DirectionGrid grid_from_json(const json& j) {
  const int dim = j.at("dim").get<int>();
  Mat nodes = columns_from_json(j.at("nodes"));
  Vec weights = vec_from_json(j.at("weights"));
  if (nodes.rows() != dim || nodes.cols() != weights.size()) throw InvalidArgument("grid fields disagree in size");
  return DirectionGrid(dim, std::move(nodes), std::move(weights));
}

json body_to_json(const Body& body) {
  return {{"dim", body.dim()},
          {"normals", to_json(body.normals())},
          {"offsets", to_json(body.offsets())},
          {"support_values", to_json(body.support_values())},
          {"vertices", to_json(body.vertices())},
          {"facet_areas", to_json(body.facet_areas())},
          {"volume", body.volume()},
          {"centroid", to_json(body.centroid())}};
}

Body body_from_json(const json& j) {
  const int dim = j.at("dim").get<int>();
  const Mat normals = columns_from_json(j.at("normals"));
  const Vec offsets = vec_from_json(j.at("offsets"));
  return wulff_shape(dim, normals, offsets);
}

json measure_to_json(const AtomicMeasure& mu) {
  json atoms = json::array();
  for (int a = 0; a < mu.size(); ++a)
    atoms.push_back({{"u", to_json(Vec(mu.directions.col(a)))}, {"mass", mu.masses[a]}});
  return {{"dim", mu.dim}, {"atoms", atoms}};
}

json measure_to_json(const SphericalMeasure& mu) {
  json j = measure_to_json(mu.to_atomic(false));
  const Vec density = mu.masses().cwiseQuotient(mu.grid().weights());
  j["density"] = to_json(density);
  j["total"] = mu.total();
  if (mu.density_bounds()) j["density_bounds"] = {mu.density_bounds()->first, mu.density_bounds()->second};
  j["invariant"] = mu.invariant();
  return j;
}

AtomicMeasure atomic_from_json(const json& j) {
  const json& atoms = j.is_array() ? j : j.at("atoms");
  if (!atoms.is_array() || atoms.empty()) throw InvalidArgument("atoms must be a nonempty list");
  AtomicMeasure mu;
  const Vec first = vec_from_json(atoms[0].at("u"));
  mu.dim = static_cast<int>(first.size());
  if (j.is_object() && j.contains("dim") && j.at("dim").get<int>() != mu.dim)
    throw InvalidArgument("atom dimension differs from dim");
  mu.directions.resize(mu.dim, static_cast<Eigen::Index>(atoms.size()));
  mu.masses.resize(static_cast<Eigen::Index>(atoms.size()));
  for (std::size_t a = 0; a < atoms.size(); ++a) {
    const Vec u = vec_from_json(atoms[a].at("u"));
    if (u.size() != mu.dim) throw InvalidArgument("atoms have different dimensions");
    if (!(u.norm() > 0.0)) throw InvalidArgument("atom direction is zero");
    const double m = atoms[a].at("mass").get<double>();
    if (!(m >= 0.0) || !std::isfinite(m)) throw InvalidArgument("atom mass must be finite and nonnegative");
    mu.directions.col(static_cast<Eigen::Index>(a)) = u.normalized();
    mu.masses[static_cast<Eigen::Index>(a)] = m;
  }
  return mu;
}

json profile_to_json(const EnergyProfile& profile) {
  json pieces = json::array();
  for (const auto& b : profile.bridge())
    pieces.push_back({{"a", b.a}, {"b", b.b}, {"coefficients", {b.c0, b.c1, b.c2, b.c3}}});
  return {{"p", profile.p()},       {"n", profile.dim()},       {"eps", profile.eps()},
          {"q", profile.q()},       {"is_phi", profile.is_phi()}, {"bridge_kind", profile.bridge_kind()},
          {"bridge", pieces}};
}

json report_to_json(const SolveReport& r) {
  json stages = json::array();
  for (const auto& s : r.stages)
    stages.push_back({{"eps", s.eps},
                      {"iterations", s.iterations},
                      {"residual", s.residual},
                      {"lambda_eps", s.lambda_eps},
                      {"energy", s.energy},
                      {"body_change", s.body_change},
                      {"converged", s.converged},
                      {"energy_monotone", s.energy_monotone},
                      {"message", s.message}});
  return {{"p", r.p},
          {"n", r.dim},
          {"stages", stages},
          {"lambda0", r.lambda0},
          {"lambda", r.lambda},
          {"touch_threshold", r.touch_threshold},
          {"touch_mass", r.touch_mass},
          {"residual_l1", r.residual_l1},
          {"residual_linf", r.residual_linf},
          {"min_gap", r.min_gap},
          {"offset_invariance", r.offset_invariance},
          {"converged", r.converged},
          {"cauchy", r.cauchy},
          {"message", r.message}};
}

json verify_to_json(const VerifyResult& v) {
  return {{"residual_l1", v.residual_l1}, {"residual_linf", v.residual_linf}};
}

json identity_to_json(const FpIdentity& id) {
  return {{"matrix", rows_to_json(id.matrix)},
          {"target", rows_to_json(id.target)},
          {"deviation", rows_to_json(id.deviation)},
          {"max_abs_deviation", id.max_abs_deviation},
          {"max_rel_deviation", std::isfinite(id.max_rel_deviation) ? json(id.max_rel_deviation) : json(nullptr)},
          {"offdiag_ratio", std::isfinite(id.offdiag_ratio) ? json(id.offdiag_ratio) : json(nullptr)}};
}

json subspace_to_json(const SubspaceReport& r) {
  json w = json::array();
  for (const auto& s : r.witnesses)
    w.push_back({{"basis", to_json(s.basis)},
                 {"dim", s.dim},
                 {"mass", s.mass},
                 {"ratio", s.ratio},
                 {"equality", s.equality},
                 {"complement", s.complement}});
  return {{"satisfied", r.satisfied}, {"equality", r.equality}, {"worst_excess", r.worst_excess}, {"witnesses", w}};
}

json positive_hull_to_json(const PositiveHullReport& r) {
  return {{"passes", r.passes},
          {"lin_dim", r.lin_dim},
          {"pos_equals_lin", r.pos_equals_lin},
          {"antipodal_pair", r.antipodal_pair},
          {"message", r.message}};
}

json symmetrization_to_json(const HemisphereSymmetrization& s) {
  return {{"v0", to_json(s.v0)},
          {"d", s.d},
          {"simplex", to_json(s.simplex)},
          {"rotation", rows_to_json(s.rotation)},
          {"lin_dim", s.lin_basis.cols()},
          {"cone_normals", to_json(s.cone_normals)},
          {"mu0", measure_to_json(s.mu0)}};
}

std::string residuals_csv(const Mat& directions, const Vec& computed, const Vec& target) {
  std::ostringstream os;
  os << std::setprecision(17);
  os << "index";
  for (Eigen::Index d = 0; d < directions.rows(); ++d) os << ",u" << d + 1;
  os << ",target,computed,residual\n";
  for (Eigen::Index i = 0; i < directions.cols(); ++i) {
    os << i;
    for (Eigen::Index d = 0; d < directions.rows(); ++d) os << ',' << directions(d, i);
    os << ',' << target[i] << ',' << computed[i] << ',' << computed[i] - target[i] << '\n';
  }
  return os.str();
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path);
  out << text;
}

std::string read_text(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InvalidArgument("cannot read " + path);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

}  // namespace lpm::io
