#pragma once

// Config-driven experiment runner behind the iqctl tool.
//
// A config is a JSON document with a top-level "mode":
//   simulate  time series of the closed-form reduced qubit state (CSV)
//   solve     control parameters steering a qubit to a target (JSON)
//   reach     probe diagonal realising an N-level target spectrum (JSON)
//   thermal   thermal probe occupancy <-> energy gap (JSON)
//   sweep     grid of closed-form rho00, |rho10| over (theta, alpha, p_p)
// Complex numbers are [re, im] pairs; matrices are arrays of rows.

#include <filesystem>
#include <iosfwd>
#include <string>

namespace iqc::cli {

enum ExitCode : int { kSuccess = 0, kError = 1, kInfeasible = 2 };

struct Options {
  std::filesystem::path out_dir = "out";
  bool quiet = false;
  bool timing = false; // add wall-clock time to JSON results
};

/// Execute a simulate/solve/reach/thermal config. Results are written to
/// out_dir/<config stem>.{csv,json}.
int run(const std::filesystem::path& config, const Options& opts,
        std::ostream& log, std::ostream& err);

/// Execute a sweep config, writing out_dir/<config stem>.csv.
int sweep(const std::filesystem::path& config, const Options& opts,
          std::ostream& log, std::ostream& err);

/// Parse and validate any config without executing it.
int check(const std::filesystem::path& config, const Options& opts,
          std::ostream& log, std::ostream& err);

/// 17 significant digits with a "." decimal separator.
std::string format_double(double x);

} // namespace iqc::cli
