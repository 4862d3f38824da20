#pragma once

// Ultra-local model y^(m) = F + alpha * u, the sliding-window estimate of F,
// and the intelligent P / PD control laws built on it.

#include <cstddef>
#include <vector>

namespace mfc {

/// Parameters of one monovariable ultra-local model and its controller.
///
/// `alpha` maps one unit of input to units of y^(m). `kd` only exists for
/// order 2; an order-1 (iP) configuration with a non-zero `kd` is rejected.
struct UltraLocalConfig {
    int order = 2;
    double alpha = 1.0;
    double sample_period = 0.004;  // s
    int window_len = 5;            // samples
    double kp = 0.0;
    double kd = 0.0;

    /// Throws ConfigError when any invariant is violated.
    void validate() const;
};

/// Per-axis estimator memory: a ring buffer of instantaneous F samples.
///
/// `f_hat()` is always the arithmetic mean of the filled entries, 0 when empty.
class AxisControllerState {
public:
    explicit AxisControllerState(int window_len = 5);

    /// Pushes one F sample, evicting the oldest when full; returns the new mean.
    double push(double f_sample);
    void reset();

    double f_hat() const { return f_hat_; }
    int filled() const { return static_cast<int>(filled_); }
    int capacity() const { return static_cast<int>(window_.size()); }

    /// Rate seen at the previous step, used by the backward difference.
    double prev_rate = 0.0;
    bool has_prev_rate = false;

private:
    std::vector<double> window_;
    std::size_t head_ = 0;
    std::size_t filled_ = 0;
    double f_hat_ = 0.0;
};

/// One control step's measured and reference signals for a single axis.
struct ControlStepInput {
    double y = 0.0;
    double y_dot = 0.0;
    double y_ref = 0.0;
    double y_ref_dot = 0.0;
    double y_ref_ddot = 0.0;
    double u_prev = 0.0;
};

/// Pushes F = y^(m) - alpha * u_prev into the window and returns the updated F-hat.
///
/// `y_deriv_m` is the m-th derivative measured over the last sample and
/// `u_prev` the input held during that sample. Non-finite inputs throw
/// NonFiniteError and leave `state` untouched.
double estimate_f(AxisControllerState& state, const UltraLocalConfig& config,
                  double y_deriv_m, double u_prev);

/// (rate_now - rate_prev) / period. Throws ConfigError for period <= 0.
double backward_difference(double rate_now, double rate_prev, double period);

/// Intelligent PD: u = -(F-hat - y_ref_ddot + kp*e + kd*e_dot) / alpha.
double ipd_step(const ControlStepInput& input, double f_hat, const UltraLocalConfig& config);

/// Intelligent P: u = -(F-hat - y_ref_dot + kp*e) / alpha.
double ip_step(const ControlStepInput& input, double f_hat, const UltraLocalConfig& config);

/// Clamps `u` into [lo, hi]. Throws ConfigError unless lo < hi.
double saturate(double u, double lo, double hi);

}  // namespace mfc
