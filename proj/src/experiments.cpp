#include "xyflow/experiments.hpp"

#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <thread>

#include "xyflow/csv.hpp"
#include "xyflow/errors.hpp"
#include "xyflow/gibbs_probe.hpp"
#include "xyflow/ground_state.hpp"
#include "xyflow/mc_engine.hpp"
#include "xyflow/parallel.hpp"

namespace xyflow {
namespace fs = std::filesystem;

namespace {

// Artifacts are built in memory and written once the experiment finishes.
using Artifacts = std::map<std::string, std::string>;

const char* flag(bool unequilibrated) { return unequilibrated ? "unequilibrated" : "ok"; }

struct Outcome {
    Artifacts files;
    bool unequilibrated = false;
};

Outcome run_kernel_table(const ExperimentConfig& c) {
    std::ostringstream s;
    CsvWriter w(s);
    w.header({"t", "delta_angle", "value", "trunc_error"});
    for (const auto& r : kernel_table(c.t, c.n_angles, c.tol)) w.row(r.t, r.delta_angle, r.value, r.trunc_error);
    return {{{"kernel_table.csv", s.str()}}};
}

Outcome run_ground_state_sweep(const ExperimentConfig& c) {
    std::ostringstream s;
    CsvWriter w(s);
    w.header({"beta", "h", "t", "degenerate", "theta_star", "epsilon_t", "g_at_max"});
    for (double beta : c.beta) {
        for (double h : c.h) {
            for (const auto& r : ground_state_sweep(beta, h, c.t, c.full_log)) {
                w.row(r.beta, r.h, r.t, r.degenerate, r.theta_star, r.epsilon_t, r.g_at_max);
            }
        }
    }
    return {{{"ground_state_sweep.csv", s.str()}}};
}

Outcome run_window(const ExperimentConfig& c, int threads) {
    struct Cell {
        double beta, h;
        std::optional<TimeWindow> scan, closed;
    };
    std::vector<Cell> cells;
    for (double beta : c.beta)
        for (double h : c.h) cells.push_back({beta, h, {}, {}});
    parallel_for(cells.size(), threads, [&](std::size_t k) {
        Cell& cell = cells[k];
        cell.scan = transition_window(cell.beta, cell.h, c.scan_t_min, c.scan_t_max, c.full_log, c.scan_step);
        if (!c.full_log) cell.closed = closed_form_window(cell.beta * cell.h);
    });

    std::ostringstream s, scan;
    CsvWriter w(s), ws(scan);
    w.header({"beta", "h", "beta_h", "t0", "t1", "closed_form_t0", "closed_form_t1"});
    ws.header({"beta", "h", "t", "inside_window"});
    auto opt = [](const std::optional<TimeWindow>& win, bool lower) {
        return win ? format_double(lower ? win->t0 : win->t1) : std::string();
    };
    for (const Cell& cell : cells) {
        w.row(cell.beta, cell.h, cell.beta * cell.h, opt(cell.scan, true), opt(cell.scan, false),
              opt(cell.closed, true), opt(cell.closed, false));
        for (double t : c.t) {
            const bool inside = cell.scan && t >= cell.scan->t0 && t <= cell.scan->t1;
            ws.row(cell.beta, cell.h, t, inside);
        }
    }
    return {{{"window.csv", s.str()}, {"window_scan.csv", scan.str()}}};
}

Outcome run_mc_scan(const ExperimentConfig& c, int threads) {
    ScanSpec spec;
    spec.d = c.d;
    spec.J = c.J;
    spec.betas = c.beta;
    spec.hs = c.h;
    spec.ts = c.t;
    spec.Ls = c.L;
    spec.mode = c.mode;
    spec.sweeps = c.sweeps;
    spec.burn_in = c.burn_in;
    spec.proposal_width = c.proposal_width;
    spec.seed = c.seed;
    spec.start_angle = c.start_angle;
    spec.error_threshold = c.error_threshold;
    spec.keep_traces = c.write_traces;
    const auto rows = symmetry_breaking_scan(spec, threads);

    Outcome out;
    std::ostringstream s, g;
    CsvWriter w(s), wg(g);
    w.header({"beta", "h", "t", "L", "boundary", "m_sin_mean", "m_sin_err", "flag"});
    for (std::size_t k = 0; k < rows.size(); ++k) {
        const auto& r = rows[k];
        w.row(r.beta, r.h, r.t, r.L, to_string(r.boundary), r.m_sin_mean, r.m_sin_err, flag(r.unequilibrated));
        out.unequilibrated |= r.unequilibrated;
        if (c.write_traces) {
            std::ostringstream ts;
            CsvWriter wt(ts);
            wt.header({"sweep", "energy", "m_sin", "m_cos"});
            for (std::size_t i = 0; i < r.trace.size(); ++i) {
                wt.row(static_cast<int>(i), r.trace.energy[i], r.trace.m_sin[i], r.trace.m_cos[i]);
            }
            char name[32];
            std::snprintf(name, sizeof name, "traces/trace_%04zu.csv", k);
            out.files[name] = ts.str();
        }
    }
    wg.header({"beta", "h", "t", "L", "gap", "gap_err", "flag"});
    for (const auto& r : boundary_gaps(rows)) {
        wg.row(r.beta, r.h, r.t, r.L, r.gap, r.gap_err, flag(r.unequilibrated));
    }
    out.files["mc_scan.csv"] = s.str();
    out.files["mc_gaps.csv"] = g.str();
    return out;
}

Outcome run_probe(const ExperimentConfig& c, int threads) {
    Outcome out;
    std::ostringstream s, dens;
    CsvWriter w(s), wd(dens);
    w.header({"beta", "h", "t", "r_in", "r_out", "gap", "gap_err", "witness_bins", "flag"});
    wd.header({"beta", "h", "t", "r_in", "bin", "theta_lo", "theta_hi", "density_right", "density_left"});
    std::uint64_t cell = 0;
    for (double beta : c.beta) {
        for (double h : c.h) {
            BadnessSpec spec;
            spec.d = c.d;
            spec.beta = beta;
            spec.J = c.J;
            spec.h = h;
            spec.ts = c.t;
            spec.r_ins = c.r_in;
            spec.sweeps = c.sweeps;
            spec.burn_in = c.burn_in;
            spec.proposal_width = c.proposal_width;
            spec.seed = derive_seed(c.seed, cell++);
            spec.annulus = c.annulus;
            for (const auto& r : badness_scan(spec, threads)) {
                w.row(r.beta, r.h, r.t, r.r_in, r.r_out, r.gap, r.gap_err, r.witness_bins, flag(r.unequilibrated));
                out.unequilibrated |= r.unequilibrated;
                const int bins = static_cast<int>(r.density_right.size());
                for (int b = 0; b < bins; ++b) {
                    wd.row(r.beta, r.h, r.t, r.r_in, b, kTwoPi * b / bins, kTwoPi * (b + 1) / bins,
                           r.density_right[b], r.density_left[b]);
                }
            }
        }
    }
    out.files["probe.csv"] = s.str();
    out.files["probe_density.csv"] = dens.str();
    return out;
}

Outcome run_oracle_check(const ExperimentConfig& c, int threads) {
    struct Job {
        double beta, h, t;
        int r_in;
        BoundarySide side;
        double tv = 0.0;
        bool unequilibrated = false;
    };
    std::vector<Job> jobs;
    for (double beta : c.beta)
        for (double h : c.h)
            for (double t : c.t)
                for (int r : c.r_in)
                    for (auto side : {BoundarySide::right, BoundarySide::left}) jobs.push_back({beta, h, t, r, side});

    parallel_for(jobs.size(), threads, [&](std::size_t k) {
        Job& job = jobs[k];
        ProbeSpec ps;
        ps.params = ModelParams{job.beta, c.J, job.h, job.t, 1, 2};
        ps.region = Region{job.r_in, 2 * job.r_in};
        const double eps = boundary_epsilon(job.beta * job.h, job.t, ChainMode::conditioned);
        ps.boundary_angle = job.side == BoundarySide::right ? kPi / 2 - eps : 3 * kPi / 2 + eps;
        ps.sweeps = c.sweeps;
        ps.burn_in = c.burn_in;
        ps.proposal_width = c.proposal_width;
        ps.start_angle = c.start_angle;
        ps.seed = derive_seed(c.seed, k);
        const auto mc = conditional_density(ps);
        const auto exact = oracle_marginal(ps.params, ps.region, ps.boundary_angle, c.n_bins);
        job.tv = tv_distance(mc.density, exact.y_bin_density(kProbeBins));
        job.unequilibrated = !mc.equilibrated;
    });

    Outcome out;
    std::ostringstream s;
    CsvWriter w(s);
    w.header({"beta", "h", "t", "r_in", "boundary", "tv", "flag"});
    for (const auto& j : jobs) {
        w.row(j.beta, j.h, j.t, j.r_in, to_string(j.side), j.tv, flag(j.unequilibrated));
        out.unequilibrated |= j.unequilibrated;
    }
    out.files["oracle_check.csv"] = s.str();
    return out;
}

Outcome dispatch(const ExperimentConfig& c, int threads) {
    switch (c.kind) {
        case ExperimentKind::kernel_table: return run_kernel_table(c);
        case ExperimentKind::ground_state_sweep: return run_ground_state_sweep(c);
        case ExperimentKind::window: return run_window(c, threads);
        case ExperimentKind::mc_scan: return run_mc_scan(c, threads);
        case ExperimentKind::probe: return run_probe(c, threads);
        case ExperimentKind::oracle_check: return run_oracle_check(c, threads);
    }
    throw DomainError("unknown experiment kind");
}

void write_file(const fs::path& path, const std::string& content) {
    fs::create_directories(path.parent_path());
    std::ofstream f(path, std::ios::binary);
    f << content;
    if (!f) throw std::runtime_error("cannot write " + path.string());
}

}  // namespace

int default_threads() {
    if (const char* env = std::getenv("XYFLOW_THREADS")) {
        const int n = std::atoi(env);
        if (n > 0) return n;
    }
    return static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
}

std::string describe_plan(const ExperimentConfig& c) {
    const std::size_t grid = c.beta.size() * c.h.size();
    std::ostringstream s;
    s << "experiment " << to_string(c.kind) << " (config " << config_hash(c) << ", seed " << c.seed << ")\n";
    switch (c.kind) {
        case ExperimentKind::kernel_table:
            s << c.t.size() << " times x " << c.n_angles << " angles -> kernel_table.csv\n";
            break;
        case ExperimentKind::ground_state_sweep:
            s << grid * c.t.size() << " (beta, h, t) points -> ground_state_sweep.csv\n";
            break;
        case ExperimentKind::window:
            s << grid << " (beta, h) scans over t in [" << c.scan_t_min << ", " << c.scan_t_max
              << "] -> window.csv, window_scan.csv\n";
            break;
        case ExperimentKind::mc_scan:
            s << grid * c.t.size() * c.L.size() * 2 << " chains of " << c.sweeps << " sweeps (d = " << c.d
              << ", mode " << to_string(c.mode) << ") -> mc_scan.csv, mc_gaps.csv\n";
            break;
        case ExperimentKind::probe:
            s << grid * c.t.size() * c.r_in.size() * 2 << " probe chains of " << c.sweeps
              << " sweeps -> probe.csv, probe_density.csv\n";
            break;
        case ExperimentKind::oracle_check:
            s << grid * c.t.size() * c.r_in.size() * 2 << " chains against a " << c.n_bins
              << "-bin transfer oracle -> oracle_check.csv\n";
            break;
    }
    return s.str();
}

RunResult run(const ExperimentConfig& config, const RunOptions& options) {
    RunResult result;
    if (options.dry_run) {
        result.message = describe_plan(config);
        return result;
    }
    const fs::path dir = options.out_dir.empty() ? fs::path(config.output) : fs::path(options.out_dir);
    const int threads = options.threads > 0 ? options.threads : default_threads();
    const auto start = std::chrono::steady_clock::now();

    Outcome outcome;
    std::string status = "complete";
    std::string error;
    try {
        fs::create_directories(dir);
        outcome = dispatch(config, threads);
        for (const auto& [name, content] : outcome.files) {
            write_file(dir / name, content);
            result.artifacts.push_back(name);
        }
    } catch (const std::exception& e) {
        status = "incomplete";
        error = e.what();
    }
    const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

    std::ostringstream m;
    CsvWriter w(m);
    w.header({"key", "value"});
    w.row("config_hash", config_hash(config));
    w.row("seed", config.seed);
    w.row("kind", to_string(config.kind));
    w.row("version", XYFLOW_VERSION);
    #if defined(__clang__)
    w.row("compiler", std::string("clang ") + __clang_version__);
#elif defined(__GNUC__)
    w.row("compiler", std::string("gcc ") + __VERSION__);
#else
    w.row("compiler", "unknown");
#endif
    w.row("threads", threads);
    w.row("wall_time_s", wall);
    w.row("status", status);
    if (!error.empty()) w.row("error", error);
    for (const auto& a : result.artifacts) w.row("artifact", a);
    try {
        write_file(dir / "manifest.csv", m.str());
    } catch (const std::exception& e) {
        if (error.empty()) error = e.what();
        status = "incomplete";
    }

    if (status != "complete") {
        result.exit_code = kExitRuntimeError;
        result.message = error;
    } else if (outcome.unequilibrated) {
        result.exit_code = kExitUnequilibrated;
        result.message = "some results are flagged unequilibrated";
    }
    return result;
}

}  // namespace xyflow
