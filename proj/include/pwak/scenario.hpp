#pragma once

// Config-driven scenario runner behind the CLI: parse and statically check a
// JSON config, execute one named scenario, collect named checks against
// pinned tolerances, and write results.json / summary.txt / CSV artifacts
// into an output directory.  All output is deterministic once the config
// suppresses the timestamp.

#include "pwak/bandwidth.hpp"
#include "pwak/weyl.hpp"

#include "json.hpp"

#include <optional>
#include <string>
#include <vector>

namespace pwak {

struct ScenarioConfig {
  std::string scenario;
  std::string name;
  bool timestamp = true;
  nlohmann::ordered_json raw;
  std::string source_path;
};

// Parses the file and requires a known top-level shape; throws
// std::runtime_error with the offending path on failure.
ScenarioConfig load_config(const std::string& path);

struct ValidationIssue {
  bool fatal = false;
  std::string message;
};
struct ValidationReport {
  bool ok = true;  // no fatal issues
  std::vector<ValidationIssue> issues;
  std::string table;  // effective parameters, one per line
};
// Static checks only: grid shape, Nyquist coverage, envelope preconditions,
// mandatory seeds, lattice-commensurability warnings.  Never runs physics.
ValidationReport validate_config(const ScenarioConfig& cfg);

struct CheckResult {
  std::string name;
  double value = 0.0;
  std::optional<double> target;
  double tolerance = 0.0;
  bool pass = true;
  std::string detail;
};

struct RunOutcome {
  int exit_code = 0;  // 0 all checks pass, 2 at least one failed
  std::string scenario;
  std::string name;
  std::vector<CheckResult> checks;
  std::vector<std::string> warnings;
};

// Executes cfg.scenario and writes results.json, summary.txt, checks.csv and
// any scenario-specific CSV tables into out_dir (created if needed).
// Throws std::runtime_error on config or runtime errors; check failures are
// reported through exit_code = 2, never by throwing.
RunOutcome run_scenario(const ScenarioConfig& cfg, const std::string& out_dir);

// The text written to summary.txt, also useful for console echo.
std::string summary_text(const RunOutcome& out);

}  // namespace pwak
