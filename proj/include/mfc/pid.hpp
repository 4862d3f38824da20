#pragma once

// Classical PID (roll, pitch) / PI (yaw) rate controller used as the baseline.

#include <array>
#include <memory>

#include "mfc/attitude_controller.hpp"
#include "mfc/types.hpp"

namespace mfc {

struct PidConfig {
    double kp = 0.0;
    double ki = 0.0;
    double kd = 0.0;
    double integral_limit = 0.2;     // clamp on the error integral, (deg/s)*s
    double deriv_filter_tau = 0.01;  // s, 0 disables the low-pass

    void validate() const;
    /// As validate(), and additionally rejects kd != 0.
    void validate_pi() const;
};

struct PidState {
    double integral = 0.0;
    double prev_error = 0.0;
    double deriv_filtered = 0.0;
    bool primed = false;  // prev_error holds a real sample
};

/// u = kp*e + ki*I + kd*D, with I the clamped running integral of e and D the
/// low-passed backward difference of e. The first call sees zero derivative.
double pid_step(PidState& state, const PidConfig& config, double error, double dt);

struct PidAxisSettings {
    PidConfig gains{};
    double sat = kDefaultAxisSaturation;
};

struct PidRateConfig {
    std::array<PidAxisSettings, 3> axes{};
    double lambda = kDefaultFilterLambda;
    double loop_hz = kDefaultLoopHz;

    PidAxisSettings& operator[](Axis a) { return axes[index(a)]; }
    const PidAxisSettings& operator[](Axis a) const { return axes[index(a)]; }
    double dt() const { return 1.0 / loop_hz; }

    /// Yaw is PI only.
    void validate() const;
};

/// PID/PI on the filtered rate error, same saturation and mixer as the MFC stack.
class RatePid final : public RateController {
public:
    explicit RatePid(PidRateConfig config);

    ControlOutput step(const RateReference& ref, const GyroReading& gyro,
                       double throttle) override;
    void reset() override;
    bool faulted() const override { return faulted_; }
    double dt() const override { return config_.dt(); }
    Vec3 saturation() const override;
    std::unique_ptr<RateController> clone() const override;

    const PidRateConfig& config() const { return config_; }

private:
    PidRateConfig config_;
    ComplementaryFilter filter_;
    std::array<PidState, 3> states_{};
    bool faulted_ = false;
    Vec3 last_filtered_{};
};

}  // namespace mfc
