#pragma once

#include <iosfwd>
#include <optional>
#include <string>

#include "config.hpp"

namespace hawking::cli {

enum ExitCode { kOk = 0, kParseFailure = 2, kValidationFailure = 3, kNumericalFailure = 4 };

struct RunOptions {
  std::optional<unsigned> seed;
  std::optional<std::string> out_dir;
  std::optional<std::string> moment_key;
  bool quiet = false;
};

/// Runs one command and writes report.json, run.csv and shape files into the output directory.
/// Returns the exit status; numerical failures flush partial outputs marked "failed".
int run_experiment(ExperimentConfig cfg, const RunOptions& opts, std::ostream& log, std::ostream& err);

/// Full command line entry point (argument parsing and config loading included).
int main_entry(int argc, char** argv);

}  // namespace hawking::cli
