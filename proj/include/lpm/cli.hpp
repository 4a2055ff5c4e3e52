#pragma once

#include <iosfwd>
#include <optional>
#include <string>

#include "lpm/io.hpp"
#include "lpm/solver.hpp"
#include "lpm/sphere.hpp"

namespace lpm {

/// Malformed configuration. `line` is 0 when the field came from a flag or is missing.
class ConfigError : public InvalidArgument {
 public:
  ConfigError(const std::string& what, std::string field, int line)
      : InvalidArgument(what), field_(std::move(field)), line_(line) {}
  const std::string& field() const { return field_; }
  int line() const { return line_; }

 private:
  std::string field_;
  int line_;
};

enum ExitCode { kExitOk = 0, kExitConfig = 1, kExitHypothesis = 2, kExitNonConvergence = 3 };

struct DensitySpec {
  std::string kind;     // const, linear, arc, cap
  double c = 1.0;       // level (const, arc, cap) or base value (linear)
  Vec a;                // linear: f(u) = c + <a, u>
  double lo = 0.0, hi = 0.0;  // arc: angles in radians, n = 2
  Vec cap_center;
  double cap_angle = 0.0;
};

struct ProblemConfig {
  std::string command;  // solve, verify, identity, check, symmetrize, smooth
  int n = 2;
  std::optional<double> p;

  std::optional<DensitySpec> density;
  std::optional<AtomicMeasure> atoms;  // inline atoms or measure_file
  std::string measure_file;

  int resolution = 0;                  // 0: per-command default
  std::optional<Group> group;
  int smooth_m = 32;
  std::string pipeline = "direct";     // direct or hemisphere
  int hemisphere_tests = 360;
  SolveOptions opts;

  Vec ellipse;                         // identity: semiaxes (unit ball when empty)
  Vec center;
  bool mismatched = false;

  std::string body_file;               // verify
  std::string output_dir = ".";

  io::json effective;                  // merged config echoed into report.json
};

/// Parses a JSON config. `overrides` (from flags) replace top-level keys
/// before validation. Throws ConfigError with the offending line and field.
ProblemConfig parse_config(const std::string& text, const io::json& overrides = io::json::object());

/// Runs one command, writes its artifacts into cfg.output_dir and returns an ExitCode.
int run_cli(const ProblemConfig& cfg, std::ostream& log);

/// Full command line: `lpmink <command> [config.json] [flags]`.
int cli_main(int argc, char** argv);

}  // namespace lpm
