#pragma once

#include <cmath>
#include <numbers>

namespace xyflow {

inline constexpr double kPi = std::numbers::pi;
inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

/// Reduce an arbitrary real into [0, 2pi).
inline double wrap_angle(double theta) noexcept {
    double r = std::fmod(theta, kTwoPi);
    if (r < 0.0) r += kTwoPi;
    // fmod of a tiny negative value plus 2pi can round up to exactly 2pi
    if (r >= kTwoPi) r = 0.0;
    return r;
}

/// Reduce into [-pi, pi].
inline double wrap_signed(double theta) noexcept {
    double r = wrap_angle(theta);
    return r > kPi ? r - kTwoPi : r;
}

/// Unsigned circular distance |x - y| reduced into [0, pi]. Exactly
/// symmetric in its arguments.
inline double circular_distance(double x, double y) noexcept {
    const double r = std::fmod(std::abs(x - y), kTwoPi);
    return r > kPi ? kTwoPi - r : r;
}

/// A point on the circle, stored in [0, 2pi).
class Angle {
public:
    constexpr Angle() = default;
    explicit Angle(double theta) noexcept : theta_(wrap_angle(theta)) {}

    double radians() const noexcept { return theta_; }

    Angle operator+(double delta) const noexcept { return Angle(theta_ + delta); }
    Angle operator-(double delta) const noexcept { return Angle(theta_ - delta); }

    /// Image under theta -> 2pi - theta.
    Angle reflected() const noexcept { return Angle(kTwoPi - theta_); }

    friend bool operator==(const Angle&, const Angle&) = default;

private:
    double theta_ = 0.0;
};

}  // namespace xyflow
