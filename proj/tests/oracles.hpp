#pragma once

// Independent reference implementations used only by the tests.

#include <algorithm>
#include <cmath>
#include <functional>
#include <vector>

namespace oracle {

inline constexpr long double kPiL = 3.141592653589793238462643383279502884L;

/// 1 + 2 sum_{n<=N} e^{-n^2 t} cos(n d), summed in long double.
inline double fourier_kernel(double d, double t, int n_max = 400) {
    long double s = 1.0L;
    for (int n = 1; n <= n_max; ++n) s += 2.0L * std::exp(-(long double)n * n * t) * std::cos((long double)n * d);
    return static_cast<double>(s);
}

/// sqrt(pi/t) sum_{|k|<=K} exp(-(d + 2 pi k)^2 / 4t).
inline double image_kernel(double d, double t, int k_max = 60) {
    long double s = 0.0L;
    for (int k = -k_max; k <= k_max; ++k) {
        const long double u = d + 2.0L * kPiL * k;
        s += std::exp(-u * u / (4.0L * t));
    }
    return static_cast<double>(std::sqrt(kPiL / t) * s);
}

/// CDF on [0, 2pi) of the wrapped normal of variance 2t started at 0.
inline double wrapped_cdf(double theta, double t) {
    long double s = theta / (2.0L * kPiL);
    for (int n = 1; n <= 200; ++n) {
        const long double a = std::exp(-(long double)n * n * t);
        if (a < 1e-18L) break;
        s += a * std::sin((long double)n * theta) / (kPiL * n);
    }
    return static_cast<double>(s);
}

/// One-sample Kolmogorov-Smirnov statistic; sorts `xs`.
inline double ks_statistic(std::vector<double>& xs, const std::function<double(double)>& cdf) {
    std::sort(xs.begin(), xs.end());
    const double n = static_cast<double>(xs.size());
    double d = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        const double f = cdf(xs[i]);
        d = std::max({d, (i + 1) / n - f, f - i / n});
    }
    return d;
}

/// Two-sample KS statistic; sorts both inputs.
inline double ks_two_sample(std::vector<double>& a, std::vector<double>& b) {
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    std::size_t i = 0, j = 0;
    double d = 0.0;
    while (i < a.size() && j < b.size()) {
        const double v = std::min(a[i], b[j]);
        while (i < a.size() && a[i] <= v) ++i;
        while (j < b.size() && b[j] <= v) ++j;
        d = std::max(d, std::abs(double(i) / a.size() - double(j) / b.size()));
    }
    return d;
}

/// Composite trapezoid rule on a periodic grid of n points (spectrally
/// accurate for smooth periodic integrands); returns the mean value.
inline double periodic_mean(const std::function<double(double)>& f, int n) {
    long double s = 0.0L;
    for (int i = 0; i < n; ++i) s += f(2.0 * M_PI * i / n);
    return static_cast<double>(s / n);
}

}  // namespace oracle
