#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <string_view>

namespace mfc {

using Vec3 = std::array<double, 3>;

enum class Axis : std::size_t { roll = 0, pitch = 1, yaw = 2 };

inline constexpr std::array<Axis, 3> kAxes{Axis::roll, Axis::pitch, Axis::yaw};

constexpr std::size_t index(Axis a) { return static_cast<std::size_t>(a); }

constexpr std::string_view axis_name(Axis a) {
    switch (a) {
        case Axis::roll: return "roll";
        case Axis::pitch: return "pitch";
        case Axis::yaw: return "yaw";
    }
    return "?";
}

/// Reference rate for one axis with its analytic time derivatives.
struct AxisReference {
    double rate = 0.0;       // deg/s
    double rate_dot = 0.0;   // deg/s^2
    double rate_ddot = 0.0;  // deg/s^3
};

struct RateReference {
    std::array<AxisReference, 3> axes{};

    AxisReference& operator[](Axis a) { return axes[index(a)]; }
    const AxisReference& operator[](Axis a) const { return axes[index(a)]; }
    Vec3 rates() const { return {axes[0].rate, axes[1].rate, axes[2].rate}; }
};

/// Body rates in deg/s as reported by the gyroscope.
struct GyroReading {
    Vec3 rate{};
    std::int64_t timestamp = 0;  // sample index

    double roll() const { return rate[0]; }
    double pitch() const { return rate[1]; }
    double yaw() const { return rate[2]; }
};

/// Normalized motor signals u1..u4.
struct MotorCommands {
    std::array<double, 4> u{};

    double& operator[](std::size_t i) { return u[i]; }
    double operator[](std::size_t i) const { return u[i]; }
    bool operator==(const MotorCommands&) const = default;
};

}  // namespace mfc
