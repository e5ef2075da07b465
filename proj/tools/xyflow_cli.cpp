// xyflow: run experiments described by a config file.
//
//   xyflow <kind> --config PATH [--seed N] [--out DIR] [--threads N] [--dry-run]
//   xyflow run --config PATH ...      (kind taken from the file)

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include "xyflow/config.hpp"
#include "xyflow/experiments.hpp"

namespace {

struct Args {
    std::string config;
    std::optional<std::uint64_t> seed;
    std::string out;
    int threads = 0;
    bool dry_run = false;
};

void add_flags(CLI::App* cmd, Args& a) {
    cmd->add_option("--config", a.config, "experiment config file")->required()->check(CLI::ExistingFile);
    cmd->add_option("--seed", a.seed, "master seed (overrides the config)");
    cmd->add_option("--out", a.out, "output directory (overrides the config)");
    cmd->add_option("--threads", a.threads, "worker threads (default: XYFLOW_THREADS or all cores)")
        ->check(CLI::NonNegativeNumber);
    cmd->add_flag("--dry-run", a.dry_run, "validate the config and print the plan");
}

bool missing(const xyflow::ConfigError& e, const std::string& key) {
    for (const auto& v : e.violations())
        if (v.key == key && v.line == 0) return true;
    return false;
}

int execute(const Args& a, std::optional<xyflow::ExperimentKind> kind) {
    std::ifstream in(a.config);
    std::stringstream buf;
    buf << in.rdbuf();
    std::string text = buf.str();

    xyflow::ExperimentConfig cfg;
    try {
        try {
            cfg = xyflow::parse_config(text);
        } catch (const xyflow::ConfigError& e) {
            // Keys supplied on the command line may be absent from the file.
            std::string extra;
            if (kind && missing(e, "experiment.kind")) extra += "kind = " + xyflow::to_string(*kind) + "\n";
            if (a.seed && missing(e, "experiment.seed")) extra += "seed = " + std::to_string(*a.seed) + "\n";
            if (extra.empty()) throw;
            cfg = xyflow::parse_config(text + "\n[experiment]\n" + extra);
        }
    } catch (const xyflow::ConfigError& e) {
        std::cerr << a.config << ": " << e.what() << "\n";
        return xyflow::kExitConfigError;
    }
    if (kind && cfg.kind != *kind) {
        std::cerr << a.config << ": config kind '" << xyflow::to_string(cfg.kind) << "' does not match subcommand '"
                  << xyflow::to_string(*kind) << "'\n";
        return xyflow::kExitConfigError;
    }
    if (a.seed) cfg.seed = *a.seed;
    if (!a.out.empty()) cfg.output = a.out;

    const auto result = xyflow::run(cfg, {cfg.output, a.threads, a.dry_run});
    if (a.dry_run) {
        std::cout << result.message;
        return result.exit_code;
    }
    for (const auto& f : result.artifacts) std::cout << cfg.output << "/" << f << "\n";
    if (!result.message.empty()) std::cerr << "xyflow: " << result.message << "\n";
    return result.exit_code;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"XY spins under diffusive dynamics: kernels, ground states, Monte Carlo probes"};
    app.set_version_flag("--version", XYFLOW_VERSION);
    app.require_subcommand(1);

    using xyflow::ExperimentKind;
    Args args;
    std::optional<ExperimentKind> kind;
    auto* generic = app.add_subcommand("run", "run the experiment named in the config");
    add_flags(generic, args);
    for (auto k : {ExperimentKind::kernel_table, ExperimentKind::ground_state_sweep, ExperimentKind::window,
                   ExperimentKind::mc_scan, ExperimentKind::probe, ExperimentKind::oracle_check}) {
        auto* cmd = app.add_subcommand(xyflow::to_string(k), "run a " + xyflow::to_string(k) + " experiment");
        add_flags(cmd, args);
        cmd->callback([&kind, k] { kind = k; });
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : xyflow::kExitConfigError;
    }
    try {
        return execute(args, kind);
    } catch (const std::exception& e) {
        std::cerr << "xyflow: " << e.what() << "\n";
        return xyflow::kExitRuntimeError;
    }
}
