#pragma once

// Heat kernel of Brownian motion on the circle, relative to the uniform
// reference measure d(theta)/2pi:
//
//   p_t(x, y) = 1 + 2 sum_{n>=1} exp(-n^2 t) cos(n (x - y))
//             = sqrt(pi/t) sum_{k in Z} exp(-(x - y + 2 pi k)^2 / (4 t))
//
// The Fourier form is used for t >= kFourierCrossover, the image sum below.
// Every evaluation carries a rigorous bound on the truncation error.

#include <span>
#include <vector>

#include "xyflow/angle.hpp"
#include "xyflow/rng.hpp"

namespace xyflow {

inline constexpr double kFourierCrossover = 0.3;
inline constexpr int kMaxKernelTerms = 100000;

/// Smallest admissible t for the three-term expansion of log p_t(x, pi).
inline constexpr double kExpansionTMin = 1.0;

struct KernelEval {
    double value = 0.0;
    double trunc_error = 0.0;  ///< |value - exact| <= trunc_error
    int n_terms = 0;
};

/// Coefficients of log p_t(x, pi) = c1 cos x + c2 cos^2 x + c3 cos^3 x + R_t(x).
struct ExpansionCoeffs {
    double t = 0.0;
    double h_t = 0.0;  ///< exp(-t)
    double c1 = 0.0;   ///< -2 h_t
    double c2 = 0.0;   ///< -2 h_t^2
    double c3 = 0.0;   ///< -(8/3) h_t^3
    double rest_bound = 0.0;

    double evaluate(double cos_x) const noexcept {
        return cos_x * (c1 + cos_x * (c2 + cos_x * c3));
    }
};

/// Number of Fourier modes needed so that 2 sum_{n>N} exp(-n^2 t) <= tol,
/// together with that tail bound.
struct FourierTruncation {
    int n_terms;
    double tail_bound;
};
FourierTruncation fourier_truncation(double t, double tol);

KernelEval kernel(Angle x, Angle y, double t, double tol);
KernelEval log_kernel(Angle x, Angle y, double t, double tol);

/// d/dx log p_t(x, y).
double log_kernel_derivative(Angle x, Angle y, double t, double tol);

ExpansionCoeffs expansion(double t);

/// C such that |R_t(x)| <= C exp(-4t) for t >= kExpansionTMin. Computed once
/// by a 8192-point scan at t = kExpansionTMin, inflated by 10%.
double expansion_rest_constant();

/// One step of the diffusion: (x0 + G) mod 2pi with G ~ N(0, 2t).
Angle sample_step(Angle x0, double t, Rng& rng);

/// log p_t(delta) tabulated on `nodes` equally spaced points of [0, 2pi),
/// evaluated by periodic linear interpolation. Used by the samplers, where
/// the kernel sits in the innermost loop.
class LogKernelTable {
public:
    LogKernelTable() = default;
    LogKernelTable(double t, int nodes = 4096, double tol = 1e-13);

    double t() const noexcept { return t_; }
    int nodes() const noexcept { return static_cast<int>(values_.size()) - 1; }

    /// Interpolated log p_t at angular difference `delta` (any real).
    double operator()(double delta) const noexcept {
        double u = wrap_angle(delta) * inv_step_;
        int i = static_cast<int>(u);
        if (i >= nodes()) i = nodes() - 1;
        double f = u - i;
        return values_[i] + f * (values_[i + 1] - values_[i]);
    }

private:
    double t_ = 0.0;
    double inv_step_ = 0.0;
    std::vector<double> values_;
};

/// Row of an exported kernel table.
struct KernelTableRow {
    double t;
    double delta_angle;
    double value;
    double trunc_error;
};

std::vector<KernelTableRow> kernel_table(std::span<const double> times, int n_angles, double tol);

}  // namespace xyflow
