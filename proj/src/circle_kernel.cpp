#include "xyflow/circle_kernel.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "xyflow/errors.hpp"

namespace xyflow {
namespace {

void require_time(double t) {
    if (!(t > 0.0) || !std::isfinite(t)) {
        throw DomainError("heat kernel requires t > 0, got t = " + std::to_string(t));
    }
}

void require_tol(double tol) {
    if (!(tol > 0.0)) {
        throw DomainError("kernel tolerance must be positive, got " + std::to_string(tol));
    }
}

// Log of the bound on sqrt(pi/t) * sum_{|k|>K} exp(-(delta + 2 pi k)^2 / 4t)
// valid for |delta| <= pi: each image satisfies |delta + 2 pi k| >= pi (2|k| - 1),
// and consecutive exponents grow by at least 2 pi^2 (K + 1) / t.
double image_log_tail(double t, int k_max) {
    const double m = k_max + 1;
    const double a = kPi * kPi * (2.0 * m - 1.0) * (2.0 * m - 1.0) / (4.0 * t);
    const double ratio = std::exp(-2.0 * kPi * kPi * m / t);
    return std::log(2.0) + 0.5 * std::log(kPi / t) - a - std::log1p(-ratio);
}

struct ImageSum {
    double log_value;
    double log_tail;
    int k_max;
};

// Evaluates the wrapped-Gaussian image sum in log space. Adds images until the
// absolute tail is below tol and the relative tail is below tol.
ImageSum image_sum(double delta, double t, double tol) {
    const double log_tol = std::log(tol);
    const double log_prefactor = 0.5 * std::log(kPi / t);
    // k = 0 term has the largest exponent because |delta| <= pi.
    const double lead = -delta * delta / (4.0 * t);
    for (int k_max = 1; k_max <= kMaxKernelTerms; ++k_max) {
        double sum = 0.0;
        for (int k = -k_max; k <= k_max; ++k) {
            const double u = delta + kTwoPi * k;
            sum += std::exp(-u * u / (4.0 * t) - lead);
        }
        const double log_value = log_prefactor + lead + std::log(sum);
        const double log_tail = image_log_tail(t, k_max);
        if (log_tail <= log_tol && log_tail - log_value <= log_tol) {
            return {log_value, log_tail, k_max};
        }
    }
    throw TruncationError("image sum did not converge within the term cap",
                          std::exp(image_log_tail(t, kMaxKernelTerms)));
}

double fourier_sum(double delta, double t, int n_terms) {
    double s = 0.0;
    // Sum smallest terms first.
    for (int n = n_terms; n >= 1; --n) {
        s += std::exp(-static_cast<double>(n) * n * t) * std::cos(n * delta);
    }
    return 1.0 + 2.0 * s;
}

}  // namespace

FourierTruncation fourier_truncation(double t, double tol) {
    require_time(t);
    require_tol(tol);
    double bound = std::numeric_limits<double>::infinity();
    for (int n = 0; n <= kMaxKernelTerms; ++n) {
        const double next = n + 1.0;
        const double ratio = std::exp(-(2.0 * n + 3.0) * t);
        bound = 2.0 * std::exp(-next * next * t) / (1.0 - ratio);
        if (bound <= tol) return {n, bound};
    }
    throw TruncationError("Fourier series of the circle kernel did not reach tol " +
                              std::to_string(tol) + " within the term cap",
                          bound);
}

KernelEval kernel(Angle x, Angle y, double t, double tol) {
    require_time(t);
    require_tol(tol);
    const double delta = circular_distance(x.radians(), y.radians());
    if (t >= kFourierCrossover) {
        const auto trunc = fourier_truncation(t, tol);
        return {fourier_sum(delta, t, trunc.n_terms), trunc.tail_bound,
                std::max(trunc.n_terms, 1)};
    }
    const auto img = image_sum(std::abs(delta), t, tol);
    return {std::exp(img.log_value), std::exp(img.log_tail), 2 * img.k_max + 1};
}

KernelEval log_kernel(Angle x, Angle y, double t, double tol) {
    require_time(t);
    require_tol(tol);
    const double delta = circular_distance(x.radians(), y.radians());
    if (t >= kFourierCrossover) {
        const auto k = kernel(x, y, t, tol);
        if (k.value - k.trunc_error <= 0.0) {
            throw PositivityLoss("kernel lower bound not positive at t = " + std::to_string(t) +
                                 "; tolerance too loose");
        }
        return {std::log(k.value), k.trunc_error / (k.value - k.trunc_error), k.n_terms};
    }
    const auto img = image_sum(std::abs(delta), t, tol);
    const double rel = std::exp(img.log_tail - img.log_value);
    if (rel >= 1.0) {
        throw PositivityLoss("kernel lower bound not positive at t = " + std::to_string(t));
    }
    return {img.log_value, rel / (1.0 - rel), 2 * img.k_max + 1};
}

double log_kernel_derivative(Angle x, Angle y, double t, double tol) {
    require_time(t);
    require_tol(tol);
    const double delta = wrap_signed(x.radians() - y.radians());
    if (t >= kFourierCrossover) {
        const auto trunc = fourier_truncation(t, tol);
        double ds = 0.0;
        for (int n = trunc.n_terms; n >= 1; --n) {
            ds += n * std::exp(-static_cast<double>(n) * n * t) * std::sin(n * delta);
        }
        return -2.0 * ds / fourier_sum(delta, t, trunc.n_terms);
    }
    const auto img = image_sum(std::abs(delta), t, tol);
    const double lead = -delta * delta / (4.0 * t);
    double num = 0.0;
    double den = 0.0;
    for (int k = -img.k_max; k <= img.k_max; ++k) {
        const double u = delta + kTwoPi * k;
        const double w = std::exp(-u * u / (4.0 * t) - lead);
        num += w * (-u / (2.0 * t));
        den += w;
    }
    return num / den;
}

double expansion_rest_constant() {
    static const double constant = [] {
        constexpr int kGrid = 8192;
        const double t = kExpansionTMin;
        const double h = std::exp(-t);
        const ExpansionCoeffs c{t, h, -2.0 * h, -2.0 * h * h, -8.0 / 3.0 * h * h * h, 0.0};
        double worst = 0.0;
        for (int i = 0; i < kGrid; ++i) {
            const double x = kTwoPi * i / kGrid;
            const double exact = log_kernel(Angle(x), Angle(kPi), t, 1e-16).value;
            worst = std::max(worst, std::abs(exact - c.evaluate(std::cos(x))));
        }
        return 1.1 * worst * std::exp(4.0 * t);
    }();
    return constant;
}

ExpansionCoeffs expansion(double t) {
    if (!(t >= kExpansionTMin)) {
        throw DomainError("log-kernel expansion requires t >= t_min = " +
                          std::to_string(kExpansionTMin) + ", got t = " + std::to_string(t));
    }
    const double h = std::exp(-t);
    return {t,
            h,
            -2.0 * h,
            -2.0 * h * h,
            -8.0 / 3.0 * h * h * h,
            expansion_rest_constant() * std::exp(-4.0 * t)};
}

Angle sample_step(Angle x0, double t, Rng& rng) {
    require_time(t);
    std::normal_distribution<double> gauss(0.0, std::sqrt(2.0 * t));
    return Angle(x0.radians() + gauss(rng));
}

LogKernelTable::LogKernelTable(double t, int nodes, double tol) : t_(t) {
    require_time(t);
    if (nodes < 2) throw DomainError("log-kernel table needs at least two nodes");
    inv_step_ = nodes / kTwoPi;
    values_.resize(static_cast<std::size_t>(nodes) + 1);
    for (int i = 0; i < nodes; ++i) {
        values_[i] = log_kernel(Angle(kTwoPi * i / nodes), Angle(0.0), t, tol).value;
    }
    values_[nodes] = values_[0];
}

std::vector<KernelTableRow> kernel_table(std::span<const double> times, int n_angles,
                                         double tol) {
    if (n_angles < 1) throw DomainError("kernel table needs at least one angle");
    std::vector<KernelTableRow> rows;
    rows.reserve(times.size() * static_cast<std::size_t>(n_angles));
    for (double t : times) {
        for (int i = 0; i < n_angles; ++i) {
            const double delta = kTwoPi * i / n_angles;
            const auto k = kernel(Angle(delta), Angle(0.0), t, tol);
            rows.push_back({t, delta, k.value, k.trunc_error});
        }
    }
    return rows;
}

}  // namespace xyflow
