#include "mfc/ultra_local.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "mfc/errors.hpp"

namespace mfc {

namespace {

void require_finite(double v, const char* name) {
    if (!std::isfinite(v)) {
        throw NonFiniteError(std::string("non-finite ") + name);
    }
}

void require_finite(const ControlStepInput& in) {
    require_finite(in.y, "y");
    require_finite(in.y_dot, "y_dot");
    require_finite(in.y_ref, "y_ref");
    require_finite(in.y_ref_dot, "y_ref_dot");
    require_finite(in.y_ref_ddot, "y_ref_ddot");
    require_finite(in.u_prev, "u_prev");
}

}  // namespace

void UltraLocalConfig::validate() const {
    if (order != 1 && order != 2) {
        throw ConfigError("ultra-local order must be 1 or 2, got " + std::to_string(order));
    }
    if (!std::isfinite(alpha) || alpha == 0.0) {
        throw ConfigError("alpha must be finite and non-zero");
    }
    if (!std::isfinite(sample_period) || sample_period <= 0.0) {
        throw ConfigError("sample_period must be > 0");
    }
    if (window_len < 1) {
        throw ConfigError("window_len must be >= 1");
    }
    if (!std::isfinite(kp) || kp < 0.0) {
        throw ConfigError("kp must be >= 0");
    }
    if (!std::isfinite(kd) || kd < 0.0) {
        throw ConfigError("kd must be >= 0");
    }
    if (order == 1 && kd != 0.0) {
        throw ConfigError("an order-1 (iP) controller has no derivative gain; kd must be 0");
    }
}

AxisControllerState::AxisControllerState(int window_len) {
    if (window_len < 1) {
        throw ConfigError("window_len must be >= 1");
    }
    window_.assign(static_cast<std::size_t>(window_len), 0.0);
}

double AxisControllerState::push(double f_sample) {
    window_[head_] = f_sample;
    head_ = (head_ + 1) % window_.size();
    filled_ = std::min(filled_ + 1, window_.size());

    // Summing the live entries each step, rather than keeping a running sum,
    // keeps the mean exact for constant input regardless of history.
    double sum = 0.0;
    for (std::size_t i = 0; i < filled_; ++i) {
        sum += window_[(head_ + window_.size() - 1 - i) % window_.size()];
    }
    f_hat_ = sum / static_cast<double>(filled_);
    return f_hat_;
}

void AxisControllerState::reset() {
    std::fill(window_.begin(), window_.end(), 0.0);
    head_ = 0;
    filled_ = 0;
    f_hat_ = 0.0;
    prev_rate = 0.0;
    has_prev_rate = false;
}

double estimate_f(AxisControllerState& state, const UltraLocalConfig& config, double y_deriv_m,
                  double u_prev) {
    require_finite(y_deriv_m, "y^(m)");
    require_finite(u_prev, "u_prev");
    if (state.capacity() != config.window_len) {
        throw ConfigError("estimator window does not match config.window_len");
    }
    return state.push(y_deriv_m - config.alpha * u_prev);
}

double backward_difference(double rate_now, double rate_prev, double period) {
    if (!(period > 0.0)) {
        throw ConfigError("backward difference needs a positive period");
    }
    require_finite(rate_now, "rate");
    require_finite(rate_prev, "previous rate");
    return (rate_now - rate_prev) / period;
}

double ipd_step(const ControlStepInput& input, double f_hat, const UltraLocalConfig& config) {
    if (config.order != 2) {
        throw ConfigError("iPD requires an order-2 ultra-local model");
    }
    require_finite(input);
    require_finite(f_hat, "F-hat");
    const double e = input.y - input.y_ref;
    const double e_dot = input.y_dot - input.y_ref_dot;
    return -(f_hat - input.y_ref_ddot + config.kp * e + config.kd * e_dot) / config.alpha;
}

double ip_step(const ControlStepInput& input, double f_hat, const UltraLocalConfig& config) {
    if (config.order != 1) {
        throw ConfigError("iP requires an order-1 ultra-local model");
    }
    require_finite(input);
    require_finite(f_hat, "F-hat");
    const double e = input.y - input.y_ref;
    return -(f_hat - input.y_ref_dot + config.kp * e) / config.alpha;
}

double saturate(double u, double lo, double hi) {
    if (!(lo < hi)) {
        throw ConfigError("saturation requires lo < hi");
    }
    return std::clamp(u, lo, hi);
}

}  // namespace mfc
