#include "xyflow/stats.hpp"

#include <cmath>
#include <limits>
#include <vector>

namespace xyflow {
namespace {

void mean_and_error(std::span<const double> block_means, double& mean, double& error) {
    const auto n = static_cast<double>(block_means.size());
    mean = 0.0;
    for (double v : block_means) mean += v;
    mean /= n;
    double var = 0.0;
    for (double v : block_means) var += (v - mean) * (v - mean);
    error = n > 1 ? std::sqrt(var / (n - 1.0) / n) : std::numeric_limits<double>::infinity();
}

}  // namespace

BlockStats blocked_mean(std::span<const double> series, int blocks) {
    BlockStats s;
    s.blocks = blocks;
    if (blocks < 2 || series.size() < static_cast<std::size_t>(2 * blocks)) {
        double m = 0.0;
        for (double v : series) m += v;
        s.mean = series.empty() ? 0.0 : m / static_cast<double>(series.size());
        s.error = std::numeric_limits<double>::infinity();
        s.equilibrated = false;
        return s;
    }
    const std::size_t per = series.size() / static_cast<std::size_t>(blocks);
    std::vector<double> means(static_cast<std::size_t>(blocks));
    for (int b = 0; b < blocks; ++b) {
        double m = 0.0;
        for (std::size_t i = 0; i < per; ++i) m += series[b * per + i];
        means[b] = m / static_cast<double>(per);
    }
    mean_and_error(means, s.mean, s.error);

    const std::size_t half = means.size() / 2;
    double e1 = 0.0, e2 = 0.0;
    mean_and_error(std::span<const double>(means).first(half), s.first_half, e1);
    mean_and_error(std::span<const double>(means).subspan(half), s.second_half, e2);
    s.half_error = std::sqrt(e1 * e1 + e2 * e2);
    s.equilibrated = std::abs(s.first_half - s.second_half) <= 2.0 * s.half_error;
    return s;
}

}  // namespace xyflow
