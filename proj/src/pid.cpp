#include "mfc/pid.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "mfc/errors.hpp"

namespace mfc {

namespace {

bool finite_nonneg(double v) { return std::isfinite(v) && v >= 0.0; }

}  // namespace

void PidConfig::validate() const {
    if (!finite_nonneg(kp) || !finite_nonneg(ki) || !finite_nonneg(kd)) {
        throw ConfigError("PID gains must be finite and >= 0");
    }
    if (kp == 0.0 && ki == 0.0 && kd == 0.0) {
        throw ConfigError("PID needs at least one non-zero gain");
    }
    if (!std::isfinite(integral_limit) || integral_limit <= 0.0) {
        throw ConfigError("integral_limit must be > 0");
    }
    if (!finite_nonneg(deriv_filter_tau)) {
        throw ConfigError("deriv_filter_tau must be >= 0");
    }
}

void PidConfig::validate_pi() const {
    validate();
    if (kd != 0.0) {
        throw ConfigError("a PI controller takes no derivative gain; kd must be 0");
    }
}

double pid_step(PidState& state, const PidConfig& config, double error, double dt) {
    if (!std::isfinite(error)) {
        throw NonFiniteError("non-finite PID error");
    }
    if (!(dt > 0.0) || !std::isfinite(dt)) {
        throw ConfigError("PID step needs dt > 0");
    }
    const double prev = state.primed ? state.prev_error : error;
    const double raw_d = (error - prev) / dt;
    const double beta = dt / (config.deriv_filter_tau + dt);

    state.integral = std::clamp(state.integral + error * dt, -config.integral_limit,
                                config.integral_limit);
    state.deriv_filtered += beta * (raw_d - state.deriv_filtered);
    state.prev_error = error;
    state.primed = true;
    return config.kp * error + config.ki * state.integral + config.kd * state.deriv_filtered;
}

void PidRateConfig::validate() const {
    if (!std::isfinite(loop_hz) || loop_hz <= 0.0) {
        throw ConfigError("loop_hz must be > 0");
    }
    if (!(lambda > 0.0 && lambda <= 1.0)) {
        throw ConfigError("lambda must be in (0, 1]");
    }
    for (Axis a : kAxes) {
        const PidAxisSettings& s = (*this)[a];
        const std::string where = std::string(axis_name(a)) + ": ";
        if (!std::isfinite(s.sat) || s.sat <= 0.0) {
            throw ConfigError(where + "sat must be > 0");
        }
        try {
            if (a == Axis::yaw) {
                s.gains.validate_pi();
            } else {
                s.gains.validate();
            }
        } catch (const ConfigError& e) {
            throw ConfigError(where + e.what());
        }
    }
}

RatePid::RatePid(PidRateConfig config) : config_(config), filter_(config.lambda) {
    config_.validate();
}

ControlOutput RatePid::step(const RateReference& ref, const GyroReading& gyro, double throttle) {
    const Vec3 r = ref.rates();
    const bool finite = std::isfinite(throttle) &&
                        std::all_of(r.begin(), r.end(), [](double x) { return std::isfinite(x); }) &&
                        std::all_of(gyro.rate.begin(), gyro.rate.end(),
                                    [](double x) { return std::isfinite(x); });
    if (!finite) {
        faulted_ = true;
        return neutral_output(throttle, last_filtered_, {});
    }

    ComplementaryFilter filter = filter_;
    std::array<PidState, 3> states = states_;
    ControlOutput out;
    try {
        const GyroReading filt = filter.filter(gyro);
        for (Axis a : kAxes) {
            const std::size_t i = index(a);
            const PidAxisSettings& s = config_[a];
            const double u = pid_step(states[i], s.gains, r[i] - filt.rate[i], config_.dt());
            out.axis_command[i] = std::clamp(u, -s.sat, s.sat);
        }
        out.filtered = filt.rate;
    } catch (const NonFiniteError&) {
        faulted_ = true;
        return neutral_output(throttle, last_filtered_, {});
    }

    filter_ = filter;
    states_ = states;
    last_filtered_ = out.filtered;
    out.motors = mix(throttle, out.axis_command[0], out.axis_command[1], out.axis_command[2]);
    out.fault = faulted_;
    return out;
}

void RatePid::reset() {
    filter_.reset();
    states_ = {};
    faulted_ = false;
    last_filtered_ = {};
}

Vec3 RatePid::saturation() const {
    return {config_[Axis::roll].sat, config_[Axis::pitch].sat, config_[Axis::yaw].sat};
}

std::unique_ptr<RateController> RatePid::clone() const {
    return std::make_unique<RatePid>(*this);
}

}  // namespace mfc
