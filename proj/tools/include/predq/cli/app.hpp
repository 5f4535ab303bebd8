#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include <json.hpp>

namespace predq::cli {

/// Exit codes of the predq tool.
enum ExitCode : int {
  kExitOk = 0,
  kExitFailure = 1,
  kExitConfig = 2,
  kExitInstability = 3,
  kExitTrace = 4,
};

/// Runs one scenario of an effective config and returns its JSON result
/// (the config itself is not included).
nlohmann::json run_scenario(const nlohmann::json& config);

/// Evaluates a named closed-form expression. Throws ConfigError listing the
/// known formulas when `formula` is unknown.
double evaluate_formula(const std::string& formula, const nlohmann::json& params);

/// Known formula names.
std::vector<std::string> formula_names();

/// Entry point of the command-line tool; writes results to `out` (or the
/// --out file) and diagnostics to `err`.
int run_cli(int argc, char** argv, std::ostream& out, std::ostream& err);

}  // namespace predq::cli
