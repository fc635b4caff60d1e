#pragma once

#include <filesystem>
#include <iosfwd>
#include <vector>

#include "config.hpp"

namespace rectprod::cli {

struct CommandResult {
  int exit_code = 0;
  std::vector<std::filesystem::path> run_dirs;
  Json summary;
};

// Each command takes a config produced by resolve_config(). `out` receives
// the command's primary stdout output; `log` receives progress lines.
//
// simulate: product_chain + eigenvalues + h_n per trial. Writes scatter.csv,
//   spectrum.csv, trials/trial_NNNN.csv, report.json, config.json. A list
//   valued chain parameter "m" runs one sub-run per value.
// oracle: Gamma-product radii, digamma-mean residuals and the T_[nx]
//   diagnostic at x_grid. Writes radii.csv, digamma.csv, diagnostics.csv,
//   report.json, config.json.
// limit: F, F*, f, f*, planar density on a grid. Writes limit.csv,
//   limit.json, config.json.
// classify: prints type diagnostics as JSON; also writes report.json.
// gof: distances between a planar sample CSV and a law or a second sample.
CommandResult cmd_simulate(const Json& cfg, std::ostream& out, std::ostream& log);
CommandResult cmd_oracle(const Json& cfg, std::ostream& out, std::ostream& log);
CommandResult cmd_limit(const Json& cfg, std::ostream& out, std::ostream& log);
CommandResult cmd_classify(const Json& cfg, std::ostream& out, std::ostream& log);
CommandResult cmd_gof(const Json& cfg, std::ostream& out, std::ostream& log);

CommandResult run_command(const std::string& command, const Json& cfg, std::ostream& out, std::ostream& log);

// Full front end: parses argv, resolves config, runs, maps errors to a
// nonzero exit code.
int main_entry(int argc, char** argv, std::ostream& out, std::ostream& err);

}  // namespace rectprod::cli
