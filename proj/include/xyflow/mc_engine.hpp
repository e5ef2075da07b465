#pragma once

// Single-site Metropolis (and heat-bath) sampling of
//
//   initial      exp(-beta H(x))
//   conditioned  exp(-beta H(x)) prod_i p_t(x_i, y_i)   (two-layer measure at time 0)
//   restricted   exp(-H_res(x))
//
// relative to the uniform product measure. Conditioned chains use a
// tabulated log kernel (LogKernelTable); their target is the tabulated
// weight.

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "xyflow/circle_kernel.hpp"
#include "xyflow/lattice_model.hpp"
#include "xyflow/rng.hpp"
#include "xyflow/stats.hpp"

namespace xyflow {

enum class ChainMode { initial, conditioned, restricted };
enum class SweepOrder { checkerboard, sequential };
enum class UpdateKind { metropolis, heat_bath };

std::string to_string(ChainMode mode);
ChainMode chain_mode_from_string(const std::string& s);

struct ChainSpec {
    ModelParams params;
    ChainMode mode = ChainMode::initial;
    /// y-layer on the box sites (conditioned mode); empty means y = (pi)_i.
    std::vector<double> y;
    /// Sites carrying a kernel factor (conditioned mode); empty means all.
    std::vector<char> kernel_mask;
    Boundary boundary = Boundary::periodic();
    int sweeps = 1000;
    int burn_in = 100;
    double proposal_width = 1.0;
    std::uint64_t seed = 0;

    bool auto_tune = true;  ///< adapt proposal_width during burn-in only
    SweepOrder order = SweepOrder::checkerboard;
    UpdateKind update = UpdateKind::metropolis;
    /// Multiplies every energy; large values approach zero temperature.
    double energy_scale = 1.0;
    /// Cold start angle; none means a uniformly random start.
    std::optional<double> start_angle = 0.0;
    /// Use the mirrored proposal stream theta - w(2u - 1).
    bool reflect_proposals = false;
    int histogram_bins = 64;
    int kernel_table_nodes = 4096;

    /// Throws DomainError when burn_in >= sweeps, proposal_width outside
    /// (0, pi], or params are invalid.
    void validate() const;
};

struct ObservableTrace {
    std::vector<double> energy;
    std::vector<double> m_sin;
    std::vector<double> m_cos;
    std::vector<int> center_bin;  ///< bin of the center site per record
    std::vector<std::uint64_t> center_histogram;
    double acceptance = 0.0;  ///< over the recorded sweeps
    double proposal_width = 0.0;  ///< after tuning

    std::size_t size() const noexcept { return energy.size(); }
};

struct SweepStats {
    std::uint64_t proposals = 0;
    std::uint64_t accepted = 0;
    std::uint64_t uphill = 0;
    std::uint64_t uphill_accepted = 0;

    double rate() const noexcept {
        return proposals ? static_cast<double>(accepted) / static_cast<double>(proposals) : 0.0;
    }
};

/// A Markov chain over one lattice configuration.
class Chain {
public:
    explicit Chain(const ChainSpec& spec);
    Chain(const ChainSpec& spec, LatticeConfig start);

    /// One full sweep in the spec's order; returns its acceptance rate.
    double sweep();

    const LatticeConfig& state() const noexcept { return x_; }
    const SweepStats& stats() const noexcept { return stats_; }
    void reset_stats() noexcept { stats_ = {}; }

    double proposal_width() const noexcept { return width_; }
    void set_proposal_width(double w) noexcept { width_ = w; }

    /// Full energy in the chain's units (scale included).
    double energy() const;
    /// Energy change of setting `site` to `theta`, in chain units.
    double delta(int site, double theta) const;

    double m_sin() const;
    double m_cos() const;

private:
    double site_term(int site, double theta) const;
    void metropolis(int site);
    void heat_bath(int site);

    ChainSpec spec_;
    LatticeConfig x_;
    Rng rng_;
    double width_;
    double coupling_;   // scale * beta * J
    double field_;      // scale * beta * h
    double scale_;
    ExpansionCoeffs coeffs_;
    LogKernelTable table_;
    std::vector<double> y_;
    std::vector<char> mask_;
    SweepStats stats_;
    std::vector<double> hb_weights_;
};

/// Called after every recorded sweep with the sweep index.
using ChainObserver = std::function<void(const LatticeConfig&, int)>;

/// Runs burn-in (with optional proposal tuning) and records one observable
/// row per sweep after it. Deterministic in the spec.
ObservableTrace run_chain(const ChainSpec& spec, const ChainObserver& observer = {});
ObservableTrace run_chain(const ChainSpec& spec, LatticeConfig start,
                          const ChainObserver& observer = {});

// ---------------------------------------------------------------------------
// Boundary-selection scan

enum class BoundarySide { right, left };
std::string to_string(BoundarySide side);

struct ScanSpec {
    int d = 3;
    double J = 1.0;
    std::vector<double> betas;
    std::vector<double> hs;
    std::vector<double> ts;
    std::vector<int> Ls;
    ChainMode mode = ChainMode::restricted;
    int sweeps = 2000;
    int burn_in = 500;
    double proposal_width = 1.0;
    std::uint64_t seed = 0;
    double start_angle = 0.0;
    /// Rows whose blocked error exceeds this are flagged unequilibrated.
    double error_threshold = 0.05;
    bool keep_traces = false;
};

struct ScanRow {
    double beta;
    double h;
    double t;
    int L;
    BoundarySide boundary;
    double boundary_angle;
    double m_sin_mean;
    double m_sin_err;
    bool unequilibrated;
    ObservableTrace trace;  ///< filled when ScanSpec::keep_traces
};

struct GapRow {
    double beta;
    double h;
    double t;
    int L;
    double gap;  ///< <m_sin>_right - <m_sin>_left
    double gap_err;
    bool unequilibrated;
};

/// epsilon_t used for the boundary pair pi/2 - eps, 3pi/2 + eps.
double boundary_epsilon(double beta_h, double t, ChainMode mode);

/// Runs every (beta, h, t, L, side) cell. Cells are ordered lexicographically
/// by (beta, h, t, L, side) and cell k uses stream k of the master seed, so
/// results do not depend on `threads`.
std::vector<ScanRow> symmetry_breaking_scan(const ScanSpec& spec, int threads = 1);

std::vector<GapRow> boundary_gaps(const std::vector<ScanRow>& rows);

}  // namespace xyflow
