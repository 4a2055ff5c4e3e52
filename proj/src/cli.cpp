#include "lpm/cli.hpp"

#include <filesystem>
#include <iostream>
#include <set>
#include <sstream>

#include <CLI11.hpp>

#include "lpm/identities.hpp"

namespace lpm {

using io::json;

namespace {

const std::set<std::string> kCommands = {"solve", "verify", "identity", "check", "symmetrize", "smooth"};

const std::set<std::string> kKeys = {
    "command", "n",         "p",          "density",   "c",          "a",           "arc",
    "cap_center", "cap_angle", "atoms",   "measure_file", "resolution", "group",     "smooth_m",
    "pipeline", "hemisphere_tests", "tol", "eps0",      "stages",     "max_iter",    "body_tol",
    "touch_threshold", "max_diameter", "newton", "seed", "ellipse",   "center",      "mismatched",
    "body_file", "output_dir"};

int line_of(const std::string& text, std::size_t byte) {
  byte = std::min(byte, text.size());
  return 1 + static_cast<int>(std::count(text.begin(), text.begin() + static_cast<long>(byte), '\n'));
}

// Line of the first `"key"` followed by a colon, 0 if absent.
int key_line(const std::string& text, const std::string& key) {
  const std::string quoted = '"' + key + '"';
  std::size_t pos = 0;
  while ((pos = text.find(quoted, pos)) != std::string::npos) {
    std::size_t k = pos + quoted.size();
    while (k < text.size() && std::isspace(static_cast<unsigned char>(text[k]))) ++k;
    if (k < text.size() && text[k] == ':') return line_of(text, pos);
    pos += quoted.size();
  }
  return 0;
}

class Reader {
 public:
  Reader(const std::string& text, json j, std::set<std::string> flags)
      : text_(text), j_(std::move(j)), flags_(std::move(flags)) {}

  const json& root() const { return j_; }
  bool has(const std::string& key) const { return j_.contains(key) && !j_.at(key).is_null(); }

  [[noreturn]] void fail(const std::string& key, const std::string& msg) const {
    std::ostringstream os;
    int line = 0;
    if (flags_.count(key)) {
      os << "flag --" << key;
    } else {
      line = key_line(text_, key);
      os << "config";
      if (line > 0) os << ':' << line;
    }
    os << ": field \"" << key << "\": " << msg;
    throw ConfigError(os.str(), key, line);
  }

  double number(const std::string& key) const {
    const json& v = j_.at(key);
    if (!v.is_number()) fail(key, "expected a number");
    const double x = v.get<double>();
    if (!std::isfinite(x)) fail(key, "expected a finite number");
    return x;
  }

  int integer(const std::string& key) const {
    const json& v = j_.at(key);
    if (!v.is_number_integer()) fail(key, "expected an integer");
    return v.get<int>();
  }

  bool boolean(const std::string& key) const {
    const json& v = j_.at(key);
    if (!v.is_boolean()) fail(key, "expected true or false");
    return v.get<bool>();
  }

  std::string string(const std::string& key) const {
    const json& v = j_.at(key);
    if (!v.is_string()) fail(key, "expected a string");
    return v.get<std::string>();
  }

  Vec vector(const std::string& key) const {
    try {
      return io::vec_from_json(j_.at(key));
    } catch (const InvalidArgument& e) {
      fail(key, e.what());
    }
  }

 private:
  const std::string& text_;
  json j_;
  std::set<std::string> flags_;
};

Group parse_group(const Reader& r, int n) {
  const json& g = r.root().at("group");
  Group group;
  try {
    if (g.is_string()) {
      const std::string s = g.get<std::string>();
      if (s.rfind("dihedral:", 0) != 0) r.fail("group", "expected \"dihedral:k\" or a list of matrices");
      if (n != 2) r.fail("group", "dihedral groups act on R^2 only");
      int k = 0;
      try {
        std::size_t used = 0;
        k = std::stoi(s.substr(9), &used);
        if (used != s.size() - 9) throw std::invalid_argument("trailing characters");
      } catch (const std::exception&) {
        r.fail("group", "bad dihedral order in \"" + s + "\"");
      }
      group = dihedral_group(k);
    } else if (g.is_array() && !g.empty()) {
      for (const json& m : g) group.push_back(io::matrix_from_rows(m));
    } else {
      r.fail("group", "expected \"dihedral:k\" or a list of matrices");
    }
    validate_group(group, n);
  } catch (const ConfigError&) {
    throw;
  } catch (const InvalidArgument& e) {
    r.fail("group", e.what());
  }
  return group;
}

DensitySpec parse_density(const Reader& r, int n) {
  DensitySpec d;
  d.kind = r.string("density");
  if (r.has("c")) d.c = r.number("c");
  if (d.kind == "const") {
    if (!(d.c > 0.0)) r.fail("c", "constant density must be positive");
  } else if (d.kind == "linear") {
    if (!r.has("a")) r.fail("a", "linear density needs a coefficient vector a");
    d.a = r.vector("a");
    if (d.a.size() != n) r.fail("a", "length must equal n");
    if (!(d.c - d.a.norm() >= 0.0)) r.fail("a", "c - |a| must be nonnegative so that f >= 0");
    if (!(d.c + d.a.norm() > 0.0)) r.fail("c", "density vanishes everywhere");
  } else if (d.kind == "arc") {
    if (n != 2) r.fail("density", "arc densities need n = 2");
    if (!r.has("arc")) r.fail("arc", "arc density needs [lo, hi] in radians");
    const Vec a = r.vector("arc");
    if (a.size() != 2 || !(a[1] > a[0]) || a[1] - a[0] >= 2.0 * std::numbers::pi)
      r.fail("arc", "expected [lo, hi] with lo < hi < lo + 2 pi");
    d.lo = a[0];
    d.hi = a[1];
    if (!(d.c > 0.0)) r.fail("c", "arc level must be positive");
  } else if (d.kind == "cap") {
    if (!r.has("cap_center")) r.fail("cap_center", "cap density needs a center direction");
    d.cap_center = r.vector("cap_center");
    if (d.cap_center.size() != n || !(d.cap_center.norm() > 0.0)) r.fail("cap_center", "expected a nonzero vector of length n");
    d.cap_center.normalize();
    if (!r.has("cap_angle")) r.fail("cap_angle", "cap density needs an angle");
    d.cap_angle = r.number("cap_angle");
    if (!(d.cap_angle > 0.0 && d.cap_angle <= std::numbers::pi)) r.fail("cap_angle", "expected an angle in (0, pi]");
    if (!(d.c > 0.0)) r.fail("c", "cap level must be positive");
  } else {
    r.fail("density", "unknown density \"" + d.kind + "\" (const, linear, arc, cap)");
  }
  return d;
}

Density make_density(const DensitySpec& d) {
  if (d.kind == "const") return [c = d.c](const Vec&) { return c; };
  if (d.kind == "linear") return [c = d.c, a = d.a](const Vec& u) { return std::max(0.0, c + a.dot(u)); };
  if (d.kind == "arc")
    return [d](const Vec& u) {
      double t = std::atan2(u[1], u[0]);
      while (t < d.lo) t += 2.0 * std::numbers::pi;
      while (t >= d.lo + 2.0 * std::numbers::pi) t -= 2.0 * std::numbers::pi;
      return t <= d.hi ? d.c : 0.0;
    };
  return [d](const Vec& u) { return angle_between(u, d.cap_center) <= d.cap_angle ? d.c : 0.0; };
}

int default_grid_resolution(const ProblemConfig& cfg) {
  if (cfg.resolution > 0) return cfg.resolution;
  if (cfg.command == "identity") return cfg.n == 2 ? 720 : 4000;
  return default_resolution(cfg.n);
}

GridPtr make_grid(const ProblemConfig& cfg, bool with_group) {
  return std::make_shared<const DirectionGrid>(
      build_grid(cfg.n, default_grid_resolution(cfg), with_group ? cfg.group : std::nullopt));
}

// The measure as atoms: inline atoms as given, densities sampled on the plain grid.
AtomicMeasure atomic_source(const ProblemConfig& cfg) {
  if (cfg.atoms) return *cfg.atoms;
  return density_measure(make_density(*cfg.density), make_grid(cfg, false)).to_atomic(true);
}

void write_json(const std::filesystem::path& path, const json& j) { io::write_text(path.string(), j.dump(2) + "\n"); }

void write_body(const std::filesystem::path& dir, const Body& body) {
  write_json(dir / "body.json", io::body_to_json(body));
  if (body.dim() == 3) io::write_text((dir / "body.off").string(), to_off(body));
}

json base_report(const ProblemConfig& cfg) { return {{"command", cfg.command}, {"config", cfg.effective}}; }

int run_solve(const ProblemConfig& cfg, const std::filesystem::path& out, std::ostream& log) {
  const double p = *cfg.p;
  json rep = base_report(cfg);
  if (cfg.pipeline == "hemisphere") {
    const AtomicMeasure mu = atomic_source(cfg);
    const HemisphereResult hr =
        solve_hemisphere(mu, p, default_grid_resolution(cfg), cfg.smooth_m, cfg.opts, cfg.hemisphere_tests);
    json sym = io::symmetrization_to_json(hr.symmetrization);
    sym.erase("mu0");
    rep["symmetrization"] = sym;
    rep["cells"] = hr.cells;
    rep["min_open_hemisphere_mass"] = hr.min_open_hemisphere;
    rep["report"] = io::report_to_json(hr.solution.report);
    rep["verification"] = io::verify_to_json(hr.verification);
    write_json(out / "report.json", rep);
    io::write_text((out / "residuals.csv").string(),
                   io::residuals_csv(hr.verification.directions, hr.verification.computed, hr.verification.target));
    write_body(out, *hr.restricted);
    log << "solve (hemisphere): residual_l1 " << hr.verification.residual_l1 << ", converged "
        << (hr.solution.report.converged ? "yes" : "no") << "\n";
    return hr.solution.report.converged ? kExitOk : kExitNonConvergence;
  }

  const bool invariant = cfg.group.has_value();
  const GridPtr grid = make_grid(cfg, invariant);
  std::optional<SphericalMeasure> mu;
  if (cfg.density) {
    mu.emplace(density_measure(make_density(*cfg.density), grid, invariant));
    if (!mu->density_bounds())
      throw HypothesisError("density vanishes on part of the sphere; smooth it or use the hemisphere pipeline");
  } else {
    SmoothingResult s = smooth_discrete(*cfg.atoms, grid, cfg.smooth_m, invariant);
    rep["cells"] = s.cells;
    mu.emplace(std::move(s.measure));
  }
  const SolveResult res = solve(*mu, p, cfg.opts);
  rep["report"] = io::report_to_json(res.report);
  rep["measure_total"] = mu->total();
  write_json(out / "report.json", rep);
  io::write_text((out / "residuals.csv").string(),
                 io::residuals_csv(grid->nodes(), mu->masses() + res.residuals, mu->masses()));
  if (res.body) write_body(out, *res.body);
  log << "solve: residual_l1 " << res.report.residual_l1 << ", lambda " << res.report.lambda << ", converged "
      << (res.report.converged ? "yes" : "no") << "\n";
  if (!res.report.converged) log << "  " << res.report.message << "\n";
  return res.report.converged ? kExitOk : kExitNonConvergence;
}

int run_verify(const ProblemConfig& cfg, const std::filesystem::path& out, std::ostream& log) {
  const double p = *cfg.p;
  Body body = [&] {
    try {
      return io::body_from_json(json::parse(io::read_text(cfg.body_file)));
    } catch (const json::exception& e) {
      throw ConfigError(std::string("config: field \"body_file\": ") + e.what(), "body_file", 0);
    }
  }();
  if (body.dim() != cfg.n) throw ConfigError("config: field \"body_file\": body dimension differs from n", "body_file", 0);
  const VerifyResult v = cfg.atoms ? verify(body, *cfg.atoms, p)
                                   : verify(body, density_measure(make_density(*cfg.density), make_grid(cfg, false)), p);
  json rep = base_report(cfg);
  rep["verification"] = io::verify_to_json(v);
  write_json(out / "report.json", rep);
  io::write_text((out / "residuals.csv").string(), io::residuals_csv(v.directions, v.computed, v.target));
  log << "verify: residual_l1 " << v.residual_l1 << ", residual_linf " << v.residual_linf << "\n";
  return kExitOk;
}

int run_identity(const ProblemConfig& cfg, const std::filesystem::path& out, std::ostream& log) {
  const Vec axes = cfg.ellipse.size() ? cfg.ellipse : Vec::Ones(cfg.n);
  const SmoothBody body = ellipsoid_model(axes, cfg.center, cfg.mismatched);
  const DirectionGrid grid = build_grid(cfg.n, default_grid_resolution(cfg));
  const FpIdentity id = fp_identity_matrix(body, *cfg.p, grid);
  json rep = base_report(cfg);
  rep["identity"] = io::identity_to_json(id);
  rep["volume"] = body.volume();
  rep["grid_size"] = grid.size();
  write_json(out / "report.json", rep);
  log << "identity: max deviation " << id.max_abs_deviation << "\n";
  return kExitOk;
}

int run_check(const ProblemConfig& cfg, const std::filesystem::path& out, std::ostream& log) {
  const AtomicMeasure mu = atomic_source(cfg);
  const SubspaceReport sub = subspace_concentration_check(mu);
  const PositiveHullReport pos = positive_hull_check(mu);
  json rep = base_report(cfg);
  rep["subspace_concentration"] = io::subspace_to_json(sub);
  rep["positive_hull"] = io::positive_hull_to_json(pos);
  const bool need_pos = !cfg.p || (*cfg.p > 0.0 && *cfg.p < 1.0);
  const bool need_sub = !cfg.p || *cfg.p == 0.0;
  const bool ok = (!need_pos || pos.passes) && (!need_sub || sub.satisfied);
  std::string message;
  if (need_pos && !pos.passes) message = pos.message;
  if (need_sub && !sub.satisfied) message += (message.empty() ? "" : "; ") + std::string("subspace concentration violated");
  rep["passes"] = ok;
  rep["message"] = ok ? std::string("hypotheses hold") : message;
  write_json(out / "report.json", rep);
  log << "check: " << rep["message"].get<std::string>() << "\n";
  return ok ? kExitOk : kExitHypothesis;
}

int run_smooth(const ProblemConfig& cfg, const std::filesystem::path& out, std::ostream& log) {
  const bool invariant = cfg.group.has_value();
  const SmoothingResult s = smooth_discrete(atomic_source(cfg), make_grid(cfg, invariant), cfg.smooth_m, invariant);
  json rep = base_report(cfg);
  rep["cells"] = s.cells;
  rep["total"] = s.measure.total();
  rep["orbit_residual"] = s.measure.orbit_residual();
  write_json(out / "report.json", rep);
  write_json(out / "measure.json", io::measure_to_json(s.measure));
  log << "smooth: " << s.cells << " cells, total mass " << s.measure.total() << "\n";
  return kExitOk;
}

int run_symmetrize(const ProblemConfig& cfg, const std::filesystem::path& out, std::ostream& log) {
  const AtomicMeasure mu = atomic_source(cfg);
  const HemisphereSymmetrization sym = symmetrize_hemisphere(mu);
  json rep = base_report(cfg);
  json s = io::symmetrization_to_json(sym);
  s.erase("mu0");
  rep["symmetrization"] = s;
  rep["min_open_hemisphere_mass"] = min_open_hemisphere_mass(sym.mu0, cfg.hemisphere_tests);
  write_json(out / "report.json", rep);
  write_json(out / "measure.json", io::measure_to_json(sym.mu0));
  log << "symmetrize: d = " << sym.d << ", " << sym.mu0.size() << " atoms\n";
  return kExitOk;
}

}  // namespace

ProblemConfig parse_config(const std::string& text, const json& overrides) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    const int line = line_of(text, e.byte == 0 ? 0 : e.byte - 1);
    throw ConfigError("config:" + std::to_string(line) + ": " + e.what(), "", line);
  }
  if (!j.is_object()) throw ConfigError("config:1: top level must be an object", "", 1);
  std::set<std::string> flags;
  for (const auto& [k, v] : overrides.items()) {
    j[k] = v;
    flags.insert(k);
  }
  const Reader r(text, j, flags);
  for (const auto& [k, v] : j.items())
    if (!kKeys.count(k)) r.fail(k, "unknown field");

  ProblemConfig cfg;
  cfg.effective = j;
  if (!r.has("command")) r.fail("command", "missing");
  cfg.command = r.string("command");
  if (!kCommands.count(cfg.command)) r.fail("command", "unknown command \"" + cfg.command + "\"");

  if (!r.has("n")) r.fail("n", "missing");
  cfg.n = r.integer("n");
  if (cfg.n != 2 && cfg.n != 3) r.fail("n", "only n = 2 and n = 3 are supported");
  const int n = cfg.n;

  if (r.has("p")) cfg.p = r.number("p");
  const bool needs_p = cfg.command == "solve" || cfg.command == "verify" || cfg.command == "identity";
  if (needs_p && !cfg.p) r.fail("p", "missing");
  if ((cfg.command == "solve" || cfg.command == "verify") && !(*cfg.p > -n && *cfg.p < 1.0))
    r.fail("p", "must lie in (-n, 1)");
  if (cfg.command == "identity" && (!(*cfg.p >= -n && *cfg.p < 1.0) || *cfg.p == 0.0))
    r.fail("p", "must lie in [-n, 1) and differ from 0");
  if (cfg.command == "check" && cfg.p && !(*cfg.p > -n && *cfg.p < 1.0)) r.fail("p", "must lie in (-n, 1)");

  int sources = 0;
  if (r.has("density")) {
    cfg.density = parse_density(r, n);
    ++sources;
  }
  if (r.has("atoms")) {
    try {
      cfg.atoms = io::atomic_from_json(j.at("atoms"));
    } catch (const InvalidArgument& e) {
      r.fail("atoms", e.what());
    } catch (const json::exception& e) {
      r.fail("atoms", e.what());
    }
    ++sources;
  }
  if (r.has("measure_file")) {
    cfg.measure_file = r.string("measure_file");
    try {
      cfg.atoms = io::atomic_from_json(json::parse(io::read_text(cfg.measure_file)));
    } catch (const InvalidArgument& e) {
      r.fail("measure_file", e.what());
    } catch (const json::exception& e) {
      r.fail("measure_file", e.what());
    }
    ++sources;
  }
  if (cfg.atoms && cfg.atoms->dim != n) r.fail(r.has("atoms") ? "atoms" : "measure_file", "atom dimension differs from n");
  if (cfg.command == "identity") {
    if (sources > 0) r.fail(r.has("density") ? "density" : r.has("atoms") ? "atoms" : "measure_file",
                            "identity takes no measure");
  } else if (sources != 1) {
    r.fail(sources == 0 ? "density" : "atoms", "exactly one of density, atoms, measure_file is required");
  }

  if (r.has("resolution")) {
    cfg.resolution = r.integer("resolution");
    if (cfg.resolution < 8) r.fail("resolution", "must be at least 8");
  }
  if (r.has("group")) cfg.group = parse_group(r, n);
  if (r.has("smooth_m")) {
    cfg.smooth_m = r.integer("smooth_m");
    if (cfg.smooth_m < 2) r.fail("smooth_m", "must be at least 2");
  }
  if (r.has("pipeline")) {
    cfg.pipeline = r.string("pipeline");
    if (cfg.pipeline != "direct" && cfg.pipeline != "hemisphere") r.fail("pipeline", "expected direct or hemisphere");
    if (cfg.pipeline == "hemisphere" && cfg.group) r.fail("group", "the hemisphere pipeline builds its own group");
  }
  if (r.has("hemisphere_tests")) {
    cfg.hemisphere_tests = r.integer("hemisphere_tests");
    if (cfg.hemisphere_tests < 1) r.fail("hemisphere_tests", "must be positive");
  }

  SolveOptions& o = cfg.opts;
  if (r.has("tol")) {
    o.tol = r.number("tol");
    if (!(o.tol > 0.0)) r.fail("tol", "must be positive");
  }
  if (r.has("eps0")) {
    o.eps0 = r.number("eps0");
    if (!(o.eps0 > 0.0 && o.eps0 < 1.0 / 3.0)) r.fail("eps0", "must lie in (0, 1/3)");
  }
  if (r.has("stages")) {
    o.stages = r.integer("stages");
    if (o.stages < 1) r.fail("stages", "must be positive");
  }
  if (r.has("max_iter")) {
    o.max_iter = r.integer("max_iter");
    if (o.max_iter < 1) r.fail("max_iter", "must be positive");
  }
  if (r.has("body_tol")) {
    o.body_tol = r.number("body_tol");
    if (!(o.body_tol >= 0.0)) r.fail("body_tol", "must be nonnegative");
  }
  if (r.has("touch_threshold")) {
    o.touch_threshold = r.number("touch_threshold");
    if (!(o.touch_threshold >= 0.0)) r.fail("touch_threshold", "must be nonnegative");
  }
  if (r.has("max_diameter")) {
    o.max_diameter = r.number("max_diameter");
    if (!(o.max_diameter > 0.0)) r.fail("max_diameter", "must be positive");
  }
  if (r.has("newton")) o.newton = r.boolean("newton");
  if (r.has("seed")) {
    const json& s = j.at("seed");
    if (!s.is_number_integer() || s.get<long long>() < 0) r.fail("seed", "expected a nonnegative integer");
    o.seed = static_cast<unsigned>(s.get<long long>());
  }

  if (r.has("ellipse")) {
    cfg.ellipse = r.vector("ellipse");
    if (cfg.ellipse.size() != n || !(cfg.ellipse.minCoeff() > 0.0)) r.fail("ellipse", "expected n positive semiaxes");
  }
  if (r.has("center")) {
    cfg.center = r.vector("center");
    if (cfg.center.size() != n) r.fail("center", "length must equal n");
    const Vec axes = cfg.ellipse.size() ? cfg.ellipse : Vec::Ones(n);
    if (cfg.center.cwiseQuotient(axes).squaredNorm() >= 1.0) r.fail("center", "origin must be interior to the ellipsoid");
  }
  if (r.has("mismatched")) cfg.mismatched = r.boolean("mismatched");

  if (r.has("body_file")) cfg.body_file = r.string("body_file");
  if (cfg.command == "verify" && cfg.body_file.empty()) r.fail("body_file", "verify needs a body file");
  if (r.has("output_dir")) cfg.output_dir = r.string("output_dir");
  return cfg;
}

int run_cli(const ProblemConfig& cfg, std::ostream& log) {
  try {
    const std::filesystem::path out(cfg.output_dir);
    std::filesystem::create_directories(out);
    if (cfg.command == "solve") return run_solve(cfg, out, log);
    if (cfg.command == "verify") return run_verify(cfg, out, log);
    if (cfg.command == "identity") return run_identity(cfg, out, log);
    if (cfg.command == "check") return run_check(cfg, out, log);
    if (cfg.command == "smooth") return run_smooth(cfg, out, log);
    return run_symmetrize(cfg, out, log);
  } catch (const HypothesisError& e) {
    log << "hypothesis failure: " << e.what() << "\n";
    return kExitHypothesis;
  } catch (const ConvergenceError& e) {
    log << "no convergence: " << e.what() << "\n";
    return kExitNonConvergence;
  } catch (const GeometryError& e) {
    log << "no convergence: " << e.what() << "\n";
    return kExitNonConvergence;
  } catch (const InvalidArgument& e) {
    log << "error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::filesystem::filesystem_error& e) {
    log << "error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const Error& e) {
    log << "error: " << e.what() << "\n";
    return kExitConfig;
  }
}

int cli_main(int argc, char** argv) {
  CLI::App app{"L_p Minkowski problem solver"};
  app.require_subcommand(1);
  std::string config_path;
  json overrides = json::object();

  struct Flag {
    const char* name;
    const char* key;
    bool integer;
  };
  const std::vector<Flag> scalars = {{"--n", "n", true},
                                     {"--p", "p", false},
                                     {"--tol", "tol", false},
                                     {"--eps0", "eps0", false},
                                     {"--stages", "stages", true},
                                     {"--max-iter", "max_iter", true},
                                     {"--body-tol", "body_tol", false},
                                     {"--touch-threshold", "touch_threshold", false},
                                     {"--resolution", "resolution", true},
                                     {"--smooth-m", "smooth_m", true},
                                     {"--seed", "seed", true},
                                     {"--c", "c", false}};
  std::vector<std::optional<double>> values(scalars.size());
  std::optional<std::string> output_dir, pipeline, body_file, density;

  for (const std::string& name : kCommands) {
    CLI::App* sub = app.add_subcommand(name, name + " command");
    sub->add_option("config", config_path, "JSON config file");
    for (std::size_t i = 0; i < scalars.size(); ++i)
      sub->add_option(scalars[i].name, values[i], std::string("override ") + scalars[i].key);
    sub->add_option("-o,--output-dir", output_dir, "directory for report.json and other outputs");
    sub->add_option("--pipeline", pipeline, "direct or hemisphere");
    sub->add_option("--body-file", body_file, "body JSON for verify");
    sub->add_option("--density", density, "density kind");
  }
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? kExitOk : kExitConfig;
  }
  std::string command;
  for (CLI::App* sub : app.get_subcommands()) command = sub->get_name();

  for (std::size_t i = 0; i < scalars.size(); ++i) {
    if (!values[i]) continue;
    const double v = *values[i];
    if (scalars[i].integer) {
      if (v != std::floor(v)) {
        std::cerr << "flag " << scalars[i].name << ": expected an integer\n";
        return kExitConfig;
      }
      overrides[scalars[i].key] = static_cast<long long>(v);
    } else {
      overrides[scalars[i].key] = v;
    }
  }
  if (output_dir) overrides["output_dir"] = *output_dir;
  if (pipeline) overrides["pipeline"] = *pipeline;
  if (body_file) overrides["body_file"] = *body_file;
  if (density) overrides["density"] = *density;
  overrides["command"] = command;

  try {
    const std::string text = config_path.empty() ? std::string("{}") : io::read_text(config_path);
    const ProblemConfig cfg = parse_config(text, overrides);
    return run_cli(cfg, std::cout);
  } catch (const ConfigError& e) {
    std::cerr << (config_path.empty() ? "" : config_path + ": ") << e.what() << "\n";
    return kExitConfig;
  } catch (const InvalidArgument& e) {
    std::cerr << e.what() << "\n";
    return kExitConfig;
  }
}

}  // namespace lpm
