#pragma once

// Three-axis rate controller: iPD on roll and pitch, iP on yaw, a
// complementary gyro filter, and the quad-X motor mixer.

#include <array>
#include <memory>
#include <optional>

#include "mfc/types.hpp"
#include "mfc/ultra_local.hpp"

namespace mfc {

inline constexpr double kDefaultAxisSaturation = 0.25;
inline constexpr double kDefaultFilterLambda = 0.7;
inline constexpr double kDefaultLoopHz = 250.0;

/// Convex blend of the newest gyro sample and the previous output.
class ComplementaryFilter {
public:
    explicit ComplementaryFilter(double lambda = kDefaultFilterLambda);

    /// The first reading initializes the state and is returned unchanged.
    /// Throws NonFiniteError on NaN/Inf without touching the state.
    GyroReading filter(const GyroReading& raw);
    void reset() { last_.reset(); }

    double lambda() const { return lambda_; }
    const std::optional<Vec3>& last_output() const { return last_; }

private:
    double lambda_;
    std::optional<Vec3> last_;
};

/// Quad-X mixer without the final clamp.
MotorCommands mix_unclamped(double u_t, double u_phi, double u_theta, double u_psi);

/// Mixer followed by a per-motor clamp to [0, 1].
MotorCommands mix(double u_t, double u_phi, double u_theta, double u_psi);

/// Per-axis settings as they appear in the controller config file.
///
/// The control law runs in its own units (alpha = 1 means one unit of u is one
/// deg/s^2, or deg/s for yaw). `output_scale` converts that into normalized
/// motor differential before saturation.
struct MfcAxisSettings {
    int order = 2;
    double alpha = 1.0;
    double kp = 0.0;
    double kd = 0.0;
    double window_seconds = 0.02;
    double sat = kDefaultAxisSaturation;
    double output_scale = 1.0;
};

struct MfcConfig {
    std::array<MfcAxisSettings, 3> axes{};
    double lambda = kDefaultFilterLambda;
    double loop_hz = kDefaultLoopHz;

    MfcAxisSettings& operator[](Axis a) { return axes[index(a)]; }
    const MfcAxisSettings& operator[](Axis a) const { return axes[index(a)]; }

    double dt() const { return 1.0 / loop_hz; }
    /// Ultra-local parameters for one axis; window_len = round(window_seconds * loop_hz).
    UltraLocalConfig ultra_local(Axis a) const;
    void validate() const;

    /// Roll/pitch iPD and yaw iP with the default gains, 0.02 s window, 250 Hz.
    static MfcConfig defaults();
};

/// Everything a controller produced on one tick, kept for telemetry.
struct ControlOutput {
    MotorCommands motors{};
    Vec3 axis_command{};  // saturated, normalized
    Vec3 filtered{};
    Vec3 f_hat{};
    bool fault = false;
};

/// Common surface of the MFC and PID rate controllers.
class RateController {
public:
    virtual ~RateController() = default;
    virtual ControlOutput step(const RateReference& ref, const GyroReading& gyro,
                               double throttle) = 0;
    virtual void reset() = 0;
    virtual bool faulted() const = 0;
    virtual double dt() const = 0;
    virtual Vec3 saturation() const = 0;
    virtual std::unique_ptr<RateController> clone() const = 0;
};

/// Fail-neutral output: all motors at the throttle, or 0 if the throttle is unusable.
ControlOutput neutral_output(double throttle, const Vec3& filtered, const Vec3& f_hat);

class AttitudeController final : public RateController {
public:
    explicit AttitudeController(MfcConfig config = MfcConfig::defaults());

    /// One 1/loop_hz tick. Any non-finite input latches the fault flag and
    /// returns neutral motors without advancing controller state.
    ControlOutput step(const RateReference& ref, const GyroReading& gyro,
                       double throttle) override;
    ControlOutput control_step(const RateReference& ref, const GyroReading& gyro, double throttle) {
        return step(ref, gyro, throttle);
    }
    void reset() override;
    bool faulted() const override { return faulted_; }
    double dt() const override { return config_.dt(); }
    Vec3 saturation() const override;
    std::unique_ptr<RateController> clone() const override;

    const MfcConfig& config() const { return config_; }
    const AxisControllerState& axis_state(Axis a) const { return axes_[index(a)].estimator; }

private:
    struct AxisRuntime {
        UltraLocalConfig law;
        AxisControllerState estimator;
        double y_int = 0.0;      // integral of measured rate (order-2 output)
        double y_ref_int = 0.0;  // integral of reference rate
        double u_prev = 0.0;     // previous command in control-law units
    };

    double step_axis(AxisRuntime& ax, const MfcAxisSettings& s, const AxisReference& ref,
                     double rate);

    MfcConfig config_;
    ComplementaryFilter filter_;
    std::array<AxisRuntime, 3> axes_;
    bool faulted_ = false;
    Vec3 last_filtered_{};
};

}  // namespace mfc
