#pragma once

#include <string>

#include <json.hpp>

#include "lpm/energy.hpp"
#include "lpm/geometry.hpp"
#include "lpm/identities.hpp"
#include "lpm/measures.hpp"
#include "lpm/solver.hpp"
#include "lpm/sphere.hpp"

namespace lpm::io {

using json = nlohmann::json;

json to_json(const Vec& v);
json to_json(const Mat& m);  // list of columns
Vec vec_from_json(const json& j);
/// List of equal-length vectors, stored as columns.
Mat columns_from_json(const json& j);
/// Square matrix given as a list of rows.
Mat matrix_from_rows(const json& j);
json rows_to_json(const Mat& m);

json grid_to_json(const DirectionGrid& grid);
DirectionGrid grid_from_json(const json& j);

json body_to_json(const Body& body);
/// Rebuilds a body from its "dim", "normals" and "offsets" fields.
Body body_from_json(const json& j);

json measure_to_json(const SphericalMeasure& mu);
json measure_to_json(const AtomicMeasure& mu);
/// {"dim", "atoms": [{"u", "mass"}]}; atoms are normalized to unit length.
AtomicMeasure atomic_from_json(const json& j);

json profile_to_json(const EnergyProfile& profile);
json report_to_json(const SolveReport& report);
json verify_to_json(const VerifyResult& v);
json identity_to_json(const FpIdentity& id);
json subspace_to_json(const SubspaceReport& r);
json positive_hull_to_json(const PositiveHullReport& r);
json symmetrization_to_json(const HemisphereSymmetrization& s);

/// "index,u1..un,target,computed,residual" rows.
std::string residuals_csv(const Mat& directions, const Vec& computed, const Vec& target);

void write_text(const std::string& path, const std::string& text);
std::string read_text(const std::string& path);

}  // namespace lpm::io
