#pragma once

#include <span>

namespace xyflow {

/// Blocked (batch-means) estimate of a time-series mean.
struct BlockStats {
    double mean = 0.0;
    double error = 0.0;  ///< standard error from block means
    double first_half = 0.0;
    double second_half = 0.0;
    double half_error = 0.0;  ///< combined standard error of the half difference
    bool equilibrated = true;  ///< halves agree within 2 sigma
    int blocks = 0;
};

inline constexpr int kDefaultBlocks = 32;

/// Splits `series` into `blocks` contiguous blocks (the tail remainder is
/// dropped). Needs at least 2 * blocks samples, else error is infinite.
BlockStats blocked_mean(std::span<const double> series, int blocks = kDefaultBlocks);

}  // namespace xyflow
