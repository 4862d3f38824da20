#pragma once

// Scripted rate references with analytic derivatives.
//
// Program syntax: `name[:axes]`, e.g. "doublet", "doublet:yaw",
// "acro-script:pitch,yaw", or `replay=path.csv` for a recorded trace.

#include <array>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "mfc/types.hpp"

namespace mfc {

inline constexpr double kDefaultRateLimit = 400.0;  // deg/s

/// Raised-cosine transition from a to b over [t0, t0 + d], with derivatives.
AxisReference smooth_step(double t, double t0, double d, double a, double b);
/// Raised-cosine pulse 0 -> amp -> 0 over [t0, t0 + d], with derivatives.
AxisReference smooth_pulse(double t, double t0, double d, double amp);

class ReferenceProgram {
public:
    enum class Kind { zero, doublet, chirp, acro, replay };

    /// Throws ConfigError for unknown names, bad axis lists or unreadable replay files.
    static ReferenceProgram parse(std::string_view spec);

    RateReference at(double t) const;
    /// Samples t = k*dt for k < steps. Replayed traces get differenced derivatives.
    /// Throws ConfigError if any rate exceeds `rate_limit`.
    std::vector<RateReference> sample(double dt, std::size_t steps,
                                      double rate_limit = kDefaultRateLimit) const;

    Kind kind() const { return kind_; }
    const std::string& spec() const { return spec_; }
    const std::array<bool, 3>& axes() const { return axes_; }

    static constexpr double kDoubletRamp = 0.3;     // s
    static constexpr double kDoubletPeriod = 4.0;   // s
    static constexpr std::array<double, 3> kDoubletAmplitude{200.0, 200.0, 150.0};
    static constexpr double kChirpAmplitude = 150.0;
    static constexpr double kChirpF0 = 0.5;
    static constexpr double kChirpF1 = 4.0;
    static constexpr double kChirpSweep = 10.0;     // s per sweep, then repeats
    static constexpr double kAcroPeriod = 10.0;

private:
    struct ReplayTrace {
        std::vector<double> t;
        std::vector<Vec3> rate;
    };

    double replay_rate(std::size_t axis, double t) const;

    Kind kind_ = Kind::zero;
    std::string spec_;
    std::array<bool, 3> axes_{true, true, true};
    ReplayTrace replay_;
};

}  // namespace mfc
