#pragma once

#include <ostream>
#include <string>

#include "cosshell/run_config.hpp"

namespace cosshell {

enum ExitCode : int {
  kExitOk = 0,
  kExitConfig = 2,
  kExitNumerical = 3,
};

// Each command writes its artifacts into out_dir (created if missing) and a summary to log.
int run_check(const RunConfig& cfg, const std::string& out_dir, std::ostream& log);
int run_solve(const RunConfig& cfg, const std::string& out_dir, std::ostream& log);
int run_compare(const RunConfig& cfg, const std::string& out_dir, std::ostream& log);
int run_convergence(const RunConfig& cfg, const std::string& out_dir, std::ostream& log);
int run_oracle(const RunConfig& cfg, const std::string& out_dir, std::ostream& log);

// Dispatches by name and maps library errors to exit codes with one line
// "error: code=<Code> message=<text>" on err.
int run_command(const std::string& name, const RunConfig& cfg, const std::string& out_dir, std::ostream& log,
                std::ostream& err);

// log2-based order from three successive values on grids refined by `ratio`.
double richardson_order(double e_coarse, double e_mid, double e_fine, double ratio = 2.0);

}  // namespace cosshell
