#pragma once

#include <stdexcept>
#include <string>

namespace xyflow {

/// Raised when an argument lies outside the domain of an operation.
class DomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/// A truncated series could not reach the requested tolerance within the
/// hard term cap. Carries the best bound that was achieved.
class TruncationError : public std::runtime_error {
public:
    TruncationError(const std::string& what, double best_bound)
        : std::runtime_error(what), best_bound_(best_bound) {}
    double best_bound() const noexcept { return best_bound_; }

private:
    double best_bound_;
};

/// The certified lower bound value - trunc_error of a kernel is not positive,
/// so its logarithm cannot be bounded.
class PositivityLoss : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Configuration and geometry mismatches.
class ShapeError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

}  // namespace xyflow
