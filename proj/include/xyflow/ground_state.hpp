#pragma once

// Single-site effective potential of the x-layer conditioned on y = (pi)_i:
//
//   g(theta) = beta h cos(theta) + log p_t(theta, pi)             (full log)
//   g(theta) = (beta h - 2 h_t) cos - 2 h_t^2 cos^2 - 8/3 h_t^3 cos^3   (three-term)
//
// Constant configurations maximizing g are the ground states of the
// conditioned system. Both forms depend on theta only through cos(theta), so
// maximizers come in reflection pairs {theta*, 2pi - theta*}.

#include <optional>
#include <vector>

#include "xyflow/angle.hpp"
#include "xyflow/circle_kernel.hpp"

namespace xyflow {

struct SitePotential {
    double beta_h = 0.0;
    double t = 0.0;
    double h_t = 0.0;
    ExpansionCoeffs coeffs;
    bool use_full_log = false;
    /// Chebyshev coefficients of p_t(theta, pi) in cos(theta); full log only.
    std::vector<double> kernel_series;

    /// Three-term potential; requires t >= kExpansionTMin.
    static SitePotential restricted(double beta_h, double t);
    /// Full-log potential; requires t >= kFourierCrossover.
    static SitePotential full_log(double beta_h, double t);

    /// delta = beta h - 2 h_t, the residual linear coefficient.
    double delta() const noexcept { return beta_h - 2.0 * h_t; }
};

double site_potential(Angle theta, const SitePotential& sp);

/// g as a function of c = cos(theta) and its derivative dg/dc.
double site_potential_c(double c, const SitePotential& sp);
double site_potential_dc(double c, const SitePotential& sp);

struct GroundStateReport {
    std::vector<Angle> maximizers;
    double epsilon_t = 0.0;  ///< pi/2 - theta* for the maximizer in (0, pi), else 0
    bool degenerate = false;
    double g_max = 0.0;
    bool best_effort = false;  ///< refine_tol was not reached
};

GroundStateReport find_maximizers(const SitePotential& sp, int grid_n = 4096,
                                  double refine_tol = 1e-13);

struct TimeWindow {
    double t0;
    double t1;
};

/// Longest t-interval inside [t_lo, t_hi] on which the maximizers are a
/// degenerate reflection pair. Scans at `step`, bisects endpoints to `tol`.
std::optional<TimeWindow> transition_window(double beta, double h, double t_lo, double t_hi,
                                            bool use_full_log = false, double step = 1e-3,
                                            double tol = 1e-6);

/// Bifurcation times of the three-term potential: the interior stationary
/// point c of 8 h_t^3 c^2 + 4 h_t^2 c = beta h - 2 h_t reaches c = +1 at t1
/// and c = -1 at t0. When that root has h_t > 1/4 the lower end is instead the
/// jump where the interior maximum and c = -1 tie. Returns none when beta h
/// admits no such interval.
std::optional<TimeWindow> closed_form_window(double beta_h);

struct SweepRow {
    double beta;
    double h;
    double t;
    bool degenerate;
    double theta_star;
    double epsilon_t;
    double g_at_max;
};

std::vector<SweepRow> ground_state_sweep(double beta, double h, const std::vector<double>& times,
                                         bool use_full_log = false);

}  // namespace xyflow
