// Subcommand orchestration shared by the CLI and the acceptance suite.
#pragma once

#include "latinpgd/config.hpp"

#include <map>
#include <string>
#include <vector>

namespace latinpgd {

inline constexpr const char* kVersion = "0.1.0";

enum ExitCode : int {
  kExitOk = 0,
  kExitFailure = 1,
  kExitInput = 2,
  kExitNotConverged = 3,
};

struct RunOutcome {
  bool converged = true;
  std::map<std::string, double> metrics;  // also written to summary.json
  std::vector<std::string> files;
  int exit_code() const { return converged ? kExitOk : kExitNotConverged; }
};

/// Each subcommand writes into out_dir (created if needed), ending with
/// manifest.json. Partial outputs are written before a non-converged return.
RunOutcome cmd_run_latin(const RunConfig& c, const std::string& out_dir);
RunOutcome cmd_run_newmark(const RunConfig& c, const std::string& out_dir);
/// Both solvers, the comparison error and the damage gap; compresses the
/// LATIN basis when solver.compress_tol > 0.
RunOutcome cmd_compare(const RunConfig& c, const std::string& out_dir);
RunOutcome cmd_matpoint(const RunConfig& c, const std::string& out_dir);
RunOutcome cmd_modal(const RunConfig& c, const std::string& out_dir);

struct CalibrateParams {
  double target = 0.42;     // max damage at the monitored point
  double tolerance = 2e-3;  // absolute on the damage
  int max_evaluations = 30;
};

/// Scales every sine amplitude by a common factor so that the reference
/// solver reaches the target max damage (bisection on the scale).
RunOutcome cmd_calibrate(const RunConfig& c, const std::string& out_dir, const CalibrateParams& params = {});

}  // namespace latinpgd
