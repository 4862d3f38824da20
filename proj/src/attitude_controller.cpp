#include "mfc/attitude_controller.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "mfc/errors.hpp"

namespace mfc {

namespace {

bool all_finite(const RateReference& ref) {
    for (const auto& a : ref.axes) {
        if (!std::isfinite(a.rate) || !std::isfinite(a.rate_dot) || !std::isfinite(a.rate_ddot)) {
            return false;
        }
    }
    return true;
}

bool all_finite(const Vec3& v) {
    return std::all_of(v.begin(), v.end(), [](double x) { return std::isfinite(x); });
}

}  // namespace

ComplementaryFilter::ComplementaryFilter(double lambda) : lambda_(lambda) {
    if (!(lambda > 0.0 && lambda <= 1.0)) {
        throw ConfigError("complementary filter lambda must be in (0, 1]");
    }
}

GyroReading ComplementaryFilter::filter(const GyroReading& raw) {
    if (!all_finite(raw.rate)) {
        throw NonFiniteError("non-finite gyro reading");
    }
    GyroReading out = raw;
    if (last_) {
        for (std::size_t i = 0; i < 3; ++i) {
            out.rate[i] = lambda_ * raw.rate[i] + (1.0 - lambda_) * (*last_)[i];
        }
    }
    last_ = out.rate;
    return out;
}

MotorCommands mix_unclamped(double u_t, double u_phi, double u_theta, double u_psi) {
    return MotorCommands{{
        u_t - u_theta - u_psi,
        u_t - u_phi + u_psi,
        u_t + u_theta - u_psi,
        u_t + u_phi + u_psi,
    }};
}

MotorCommands mix(double u_t, double u_phi, double u_theta, double u_psi) {
    MotorCommands m = mix_unclamped(u_t, u_phi, u_theta, u_psi);
    for (double& u : m.u) {
        u = std::clamp(u, 0.0, 1.0);
    }
    return m;
}

UltraLocalConfig MfcConfig::ultra_local(Axis a) const {
    const MfcAxisSettings& s = (*this)[a];
    UltraLocalConfig c;
    c.order = s.order;
    c.alpha = s.alpha;
    c.kp = s.kp;
    c.kd = s.kd;
    c.sample_period = 1.0 / loop_hz;
    c.window_len = static_cast<int>(std::lround(s.window_seconds * loop_hz));
    return c;
}

void MfcConfig::validate() const {
    if (!std::isfinite(loop_hz) || loop_hz <= 0.0) {
        throw ConfigError("loop_hz must be > 0");
    }
    if (!(lambda > 0.0 && lambda <= 1.0)) {
        throw ConfigError("lambda must be in (0, 1]");
    }
    for (Axis a : kAxes) {
        const MfcAxisSettings& s = (*this)[a];
        const std::string where = std::string(axis_name(a)) + ": ";
        if (!std::isfinite(s.sat) || s.sat <= 0.0) {
            throw ConfigError(where + "sat must be > 0");
        }
        if (!std::isfinite(s.output_scale) || s.output_scale <= 0.0) {
            throw ConfigError(where + "output_scale must be > 0");
        }
        if (!std::isfinite(s.window_seconds) || s.window_seconds <= 0.0) {
            throw ConfigError(where + "window_seconds must be > 0");
        }
        try {
            ultra_local(a).validate();
        } catch (const ConfigError& e) {
            throw ConfigError(where + e.what());
        }
    }
}

MfcConfig MfcConfig::defaults() {
    MfcConfig c;
    c[Axis::roll] = {2, 1.0, 3.0, 0.096, 0.02, kDefaultAxisSaturation, 5e-5};
    c[Axis::pitch] = {2, 1.0, 2.7, 0.096, 0.02, kDefaultAxisSaturation, 5e-5};
    c[Axis::yaw] = {1, 1.0, 2.7, 0.0, 0.02, kDefaultAxisSaturation, 3e-4};
    return c;
}

ControlOutput neutral_output(double throttle, const Vec3& filtered, const Vec3& f_hat) {
    const double u = std::isfinite(throttle) ? std::clamp(throttle, 0.0, 1.0) : 0.0;
    ControlOutput out;
    out.motors = MotorCommands{{u, u, u, u}};
    out.filtered = filtered;
    out.f_hat = f_hat;
    out.fault = true;
    return out;
}

AttitudeController::AttitudeController(MfcConfig config)
    : config_(config), filter_(config.lambda) {
    config_.validate();
    for (Axis a : kAxes) {
        UltraLocalConfig law = config_.ultra_local(a);
        axes_[index(a)] = AxisRuntime{law, AxisControllerState(law.window_len)};
    }
}

double AttitudeController::step_axis(AxisRuntime& ax, const MfcAxisSettings& s,
                                     const AxisReference& ref, double rate) {
    const double T = ax.law.sample_period;
    AxisControllerState& est = ax.estimator;
    const double rate_dot = est.has_prev_rate ? backward_difference(rate, est.prev_rate, T) : 0.0;
    est.prev_rate = rate;
    est.has_prev_rate = true;

    // The newest derivative sample is paired with the command held over the
    // interval that produced it.
    const double f_hat = estimate_f(est, ax.law, rate_dot, ax.u_prev);

    double u = 0.0;
    if (ax.law.order == 2) {
        // Order 2 acts on the integrated rate (attitude), so the gyro itself
        // is the first derivative and its difference the second.
        ax.y_int += T * rate;
        ax.y_ref_int += T * ref.rate;
        ControlStepInput in{ax.y_int, rate, ax.y_ref_int, ref.rate, ref.rate_dot, ax.u_prev};
        u = ipd_step(in, f_hat, ax.law);
    } else {
        ControlStepInput in{rate, rate_dot, ref.rate, ref.rate_dot, 0.0, ax.u_prev};
        u = ip_step(in, f_hat, ax.law);
    }
    const double u_norm = saturate(u * s.output_scale, -s.sat, s.sat);
    ax.u_prev = u_norm / s.output_scale;
    return u_norm;
}

ControlOutput AttitudeController::step(const RateReference& ref, const GyroReading& gyro,
                                       double throttle) {
    auto current_f_hat = [this] {
        return Vec3{axes_[0].estimator.f_hat(), axes_[1].estimator.f_hat(),
                    axes_[2].estimator.f_hat()};
    };
    if (!all_finite(ref) || !all_finite(gyro.rate) || !std::isfinite(throttle)) {
        faulted_ = true;
        return neutral_output(throttle, last_filtered_, current_f_hat());
    }

    // Work on copies so a fault mid-step leaves the controller as it was.
    ComplementaryFilter filter = filter_;
    std::array<AxisRuntime, 3> axes = axes_;
    ControlOutput out;
    try {
        const GyroReading filt = filter.filter(gyro);
        for (Axis a : kAxes) {
            const std::size_t i = index(a);
            out.axis_command[i] = step_axis(axes[i], config_[a], ref[a], filt.rate[i]);
            out.f_hat[i] = axes[i].estimator.f_hat();
        }
        out.filtered = filt.rate;
    } catch (const NonFiniteError&) {
        faulted_ = true;
        return neutral_output(throttle, last_filtered_, current_f_hat());
    }

    filter_ = filter;
    axes_ = std::move(axes);
    last_filtered_ = out.filtered;
    out.motors = mix(throttle, out.axis_command[0], out.axis_command[1], out.axis_command[2]);
    out.fault = faulted_;
    return out;
}

void AttitudeController::reset() {
    filter_.reset();
    for (auto& ax : axes_) {
        ax.estimator.reset();
        ax.y_int = 0.0;
        ax.y_ref_int = 0.0;
        ax.u_prev = 0.0;
    }
    faulted_ = false;
    last_filtered_ = {};
}

Vec3 AttitudeController::saturation() const {
    return {config_[Axis::roll].sat, config_[Axis::pitch].sat, config_[Axis::yaw].sat};
}

std::unique_ptr<RateController> AttitudeController::clone() const {
    return std::make_unique<AttitudeController>(*this);
}

}  // namespace mfc
