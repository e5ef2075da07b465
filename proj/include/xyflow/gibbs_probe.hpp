#pragma once

// Numerical probe of discontinuous single-site conditional densities of the
// time-t measure. The x-layer on a box Gamma (radius r_out) is sampled with
// weight exp(-beta H(x)) prod_{i != 0} p_t(x_i, pi) under a fixed x boundary
// outside Gamma, and the conditional density of y_0 is
//
//   f(y_0) = < p_t(x_0, y_0) >.
//
// Two boundaries (pi/2 - eps_t and 3pi/2 + eps_t) are compared in total
// variation. A transfer-matrix oracle evaluates the same densities exactly
// on a discretized circle for chains and narrow strips.

#include <cstdint>
#include <string>
#include <vector>

#include "xyflow/lattice_model.hpp"
#include "xyflow/mc_engine.hpp"

namespace xyflow {

inline constexpr int kProbeBins = 64;

struct Region {
    int r_in = 1;
    int r_out = 2;

    void validate() const;
    int side() const noexcept { return 2 * r_out + 1; }
};

struct ProbeSpec {
    ModelParams params;  ///< L is ignored; the box is the region's Gamma
    Region region;
    double boundary_angle = kPi / 2;
    /// Replace the x boundary by a y-layer annulus at boundary_angle on
    /// Gamma \ Lambda (x boundary free).
    bool annulus = false;
    int sweeps = 4000;
    int burn_in = 1000;
    double proposal_width = 1.0;
    std::uint64_t seed = 0;
    double start_angle = 0.0;
    bool reflect_proposals = false;
    int blocks = kDefaultBlocks;
};

struct DensityEstimate {
    std::vector<double> density;  ///< bin averages of f under d(theta)/2pi, kProbeBins bins
    std::vector<double> error;    ///< blocked standard error per bin
    bool equilibrated = true;
    int samples = 0;
};

/// Chain spec used to sample the x-layer for a probe.
ChainSpec probe_chain_spec(const ProbeSpec& spec);

DensityEstimate conditional_density(const ProbeSpec& spec);

double tv_distance(const std::vector<double>& f, const std::vector<double>& g);

// ---------------------------------------------------------------------------
// Transfer-matrix oracle

enum class StripEnds { periodic, fixed, free };

struct OracleSpec {
    double beta_J = 0.0;
    double beta_h = 0.0;
    double t = 1.0;
    int length = 3;  ///< columns along the transfer direction
    int width = 1;   ///< rows; 1 for a chain, up to 3 for d = 2 strips
    StripEnds ends = StripEnds::periodic;
    double end_angle = 0.0;  ///< fixed ends
    bool transverse_periodic = false;
    /// y-layer per site (column-major: site = column * width + row). NaN
    /// means no kernel factor. Empty means no kernel factors at all.
    std::vector<double> y;
    int target = 0;  ///< site whose marginal is returned
    int n_bins = 256;
};

struct OracleResult {
    int n_bins = 0;
    std::vector<double> x_density;  ///< marginal of x_target at nodes (a + 1/2) 2pi/n
    std::vector<double> y_density;  ///< f(y_target) at the same nodes

    /// Spectral interpolation of the marginal (chains only).
    std::vector<double> x_kernel_left;
    std::vector<double> x_kernel_right;
    std::vector<double> ring;  ///< n x n closing matrix for periodic chains
    double beta_J = 0.0;
    double beta_h = 0.0;
    double t = 0.0;
    double target_y = 0.0;  ///< NaN when the target carries no kernel factor
    StripEnds ends = StripEnds::free;
    double end_angle = 0.0;
    bool interpolable = false;
    double norm = 1.0;

    double x_density_at(double theta) const;
    double y_density_at(double y) const;
    /// Probabilities of `bins` equal arcs under the x marginal.
    std::vector<double> x_bin_probabilities(int bins) const;
    /// Bin averages of f(y) over `bins` equal arcs.
    std::vector<double> y_bin_density(int bins) const;
};

/// Refuses (DomainError) when width > 3, n_bins is not a power of two, or
/// the state space n_bins^width exceeds 2^18.
OracleResult transfer_oracle(const OracleSpec& spec);

/// Conditional density of y_0 for a d = 1 region, with the same conditioning
/// as conditional_density.
OracleResult oracle_marginal(const ModelParams& p, const Region& region, double boundary_angle,
                             int n_bins = 256);

// ---------------------------------------------------------------------------
// Scan

struct BadnessSpec {
    int d = 3;
    double beta = 1.0;
    double J = 1.0;
    double h = 0.1;
    std::vector<double> ts;
    std::vector<int> r_ins;
    int sweeps = 4000;
    int burn_in = 1000;
    double proposal_width = 1.0;
    std::uint64_t seed = 0;
    bool annulus = false;
};

struct ProbeRow {
    double beta;
    double h;
    double t;
    int r_in;
    int r_out;
    double gap;
    double gap_err;
    std::string witness_bins;
    bool unequilibrated;
    std::vector<double> density_right;
    std::vector<double> density_left;
};

/// gap = TV distance between the two boundary densities; gap_err is half the
/// mean per-bin standard error of their difference, the scale of the noise
/// contribution to the TV estimate. Cells are ordered by (t, r_in) and use
/// seed streams 2k (right) and 2k+1 (left).
std::vector<ProbeRow> badness_scan(const BadnessSpec& spec, int threads = 1);

/// Bins where f > g, formatted as ranges "a-b;c".
std::string witness_bins(const std::vector<double>& f, const std::vector<double>& g);

}  // namespace xyflow
