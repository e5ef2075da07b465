#pragma once

// Experiment runner behind the command-line tool.

#include <string>
#include <vector>

#include "xyflow/config.hpp"

namespace xyflow {

enum ExitCode : int {
    kExitOk = 0,
    kExitConfigError = 2,
    kExitRuntimeError = 3,
    kExitUnequilibrated = 4,
};

struct RunOptions {
    std::string out_dir;  ///< empty: use config.output
    int threads = 0;      ///< <= 0: default_threads()
    bool dry_run = false;
};

struct RunResult {
    int exit_code = kExitOk;
    std::vector<std::string> artifacts;  ///< paths relative to the output directory
    std::string message;
};

/// XYFLOW_THREADS if set and positive, else the hardware concurrency.
int default_threads();

/// Human-readable list of the jobs `run` would execute.
std::string describe_plan(const ExperimentConfig& config);

/// Executes the experiment and writes CSV artifacts plus manifest.csv into
/// the output directory. Module errors are reported through the exit code;
/// the manifest then says "incomplete".
RunResult run(const ExperimentConfig& config, const RunOptions& options = {});

}  // namespace xyflow
