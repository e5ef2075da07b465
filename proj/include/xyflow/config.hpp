#pragma once

// Experiment configuration files.
//
// Line-oriented "key = value" pairs grouped under [section] headers; '#'
// starts a comment. Lists are comma separated; real lists also accept an
// inclusive range "start:stop:step". Every key is typed and range-checked,
// and parsing reports every violation with its line number.

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "xyflow/mc_engine.hpp"

namespace xyflow {

enum class ExperimentKind { kernel_table, ground_state_sweep, window, mc_scan, probe, oracle_check };

std::string to_string(ExperimentKind kind);
/// Accepts the hyphenated names ("kernel-table", "mc-scan", ...).
ExperimentKind experiment_kind_from_string(const std::string& s);

struct ExperimentConfig {
    ExperimentKind kind = ExperimentKind::kernel_table;
    std::uint64_t seed = 0;
    std::string output = "out";

    // [model]
    int d = 3;
    double J = 1.0;
    std::vector<double> beta{1.0};
    std::vector<double> h{0.1};
    std::vector<double> t{1.0};
    std::vector<int> L{4};

    // [chain]
    ChainMode mode = ChainMode::restricted;
    int sweeps = 2000;
    int burn_in = 500;
    double proposal_width = 1.0;
    double start_angle = 0.0;
    double error_threshold = 0.05;
    bool write_traces = false;

    // [kernel]
    double tol = 1e-12;
    int n_angles = 64;

    // [ground_state]
    bool full_log = false;
    double scan_t_min = 1.0;
    double scan_t_max = 10.0;
    double scan_step = 1e-3;

    // [probe]
    std::vector<int> r_in{2};
    bool annulus = false;

    // [oracle]
    int n_bins = 256;

    bool operator==(const ExperimentConfig&) const = default;
};

struct ConfigViolation {
    int line;  ///< 0 when not tied to a line (missing key)
    std::string key;
    std::string message;
};

class ConfigError : public std::runtime_error {
public:
    explicit ConfigError(std::vector<ConfigViolation> violations);
    const std::vector<ConfigViolation>& violations() const noexcept { return violations_; }

private:
    std::vector<ConfigViolation> violations_;
};

/// Throws ConfigError listing every violation.
ExperimentConfig parse_config(const std::string& text);

/// Canonical text form: every key, fixed section order, shortest
/// round-trip numbers. parse_config(to_canonical(c)) == c.
std::string to_canonical(const ExperimentConfig& config);

/// FNV-1a 64-bit hash of the canonical form, as 16 hex digits.
std::string config_hash(const ExperimentConfig& config);

}  // namespace xyflow
