#include "mfc/quad_sim.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "mfc/attitude_controller.hpp"
#include "mfc/errors.hpp"

namespace mfc {

namespace {

bool finite_pos(double v) { return std::isfinite(v) && v > 0.0; }

bool all_finite(const Vec3& v) {
    return std::all_of(v.begin(), v.end(), [](double x) { return std::isfinite(x); });
}

}  // namespace

void VehicleParams::validate() const {
    for (double i : inertia) {
        if (!finite_pos(i)) throw ConfigError(name + ": inertia components must be > 0");
    }
    if (!finite_pos(arm_length)) throw ConfigError(name + ": arm_length must be > 0");
    if (!finite_pos(thrust_coeff)) throw ConfigError(name + ": thrust_coeff must be > 0");
    if (!finite_pos(torque_coeff)) throw ConfigError(name + ": torque_coeff must be > 0");
    if (!finite_pos(motor_tau)) throw ConfigError(name + ": motor_tau must be > 0");
    if (!std::isfinite(yaw_drag) || yaw_drag < 0.0) {
        throw ConfigError(name + ": yaw_drag must be >= 0");
    }
}

void FaultSpec::validate() const {
    for (double e : prop_effectiveness) {
        if (!(e > 0.0 && e <= 1.0)) throw ConfigError("prop_effectiveness must be in (0, 1]");
    }
    if (!std::isfinite(imbalance_amp) || imbalance_amp < 0.0) {
        throw ConfigError("imbalance_amp must be >= 0");
    }
    if (!std::isfinite(imbalance_freq) || imbalance_freq < 0.0) {
        throw ConfigError("imbalance_freq must be >= 0");
    }
    if (!std::isfinite(onset_time) || onset_time < 0.0) {
        throw ConfigError("onset_time must be >= 0");
    }
    if (!all_finite(static_torque)) throw ConfigError("static_torque must be finite");
}

void GyroNoiseSpec::validate() const {
    if (!std::isfinite(std_dev) || std_dev < 0.0) throw ConfigError("gyro std_dev must be >= 0");
    if (!all_finite(bias)) throw ConfigError("gyro bias must be finite");
}

void WindSpec::validate() const {
    for (double s : sigma) {
        if (!std::isfinite(s) || s < 0.0) throw ConfigError("wind sigma must be >= 0");
    }
    if (!finite_pos(tau)) throw ConfigError("wind tau must be > 0");
}

Vec3 motor_torque(const VehicleParams& v, const std::array<double, 4>& motor,
                  const FaultSpec& faults, double t, const Vec3& omega) {
    const bool active = t >= faults.onset_time;
    std::array<double, 4> thrust{};
    std::array<double, 4> reaction{};
    for (std::size_t i = 0; i < 4; ++i) {
        const double eff = active ? faults.prop_effectiveness[i] : 1.0;
        thrust[i] = v.thrust_coeff * eff * motor[i];
        reaction[i] = v.torque_coeff * eff * motor[i];
    }
    // Motors 2/4 sit on the roll arms, 1/3 on the pitch arms; 1 and 3 spin
    // one way, 2 and 4 the other.
    Vec3 tau{
        v.arm_length * (thrust[3] - thrust[1]),
        v.arm_length * (thrust[2] - thrust[0]),
        -reaction[0] + reaction[1] - reaction[2] + reaction[3] - v.yaw_drag * omega[2] * kRadToDeg,
    };
    if (active) {
        const double phase = 2.0 * std::numbers::pi * faults.imbalance_freq * t;
        tau[0] += faults.imbalance_amp * std::sin(phase);
        tau[1] += faults.imbalance_amp * std::cos(phase);
        for (std::size_t i = 0; i < 3; ++i) tau[i] += faults.static_torque[i];
    }
    return tau;
}

SimState sim_step(const SimState& state, const MotorCommands& motors, double dt,
                  const VehicleParams& vehicle, const FaultSpec& faults,
                  const Vec3& external_torque) {
    if (!(dt > 0.0)) throw ConfigError("sim_step needs dt > 0");
    SimState next = state;
    const double a = 1.0 - std::exp(-dt / vehicle.motor_tau);
    for (std::size_t i = 0; i < 4; ++i) {
        next.motor[i] += a * (std::clamp(motors[i], 0.0, 1.0) - next.motor[i]);
    }

    Vec3 tau = motor_torque(vehicle, next.motor, faults, state.t, state.omega);
    const Vec3& I = vehicle.inertia;
    const Vec3& w = state.omega;
    Vec3 gyroscopic{};
    if (vehicle.rate_cross_coupling) {
        gyroscopic = {(I[1] - I[2]) * w[1] * w[2], (I[2] - I[0]) * w[2] * w[0],
                      (I[0] - I[1]) * w[0] * w[1]};
    }
    for (std::size_t i = 0; i < 3; ++i) {
        next.omega[i] = w[i] + dt * (tau[i] + external_torque[i] + gyroscopic[i]) / I[i];
    }
    next.t = state.t + dt;

    if (!all_finite(next.omega) ||
        !std::all_of(next.motor.begin(), next.motor.end(), [](double x) { return std::isfinite(x); })) {
        throw SimulationFault("plant state became non-finite at t=" + std::to_string(state.t));
    }
    return next;
}

GyroReading read_gyro(const SimState& state, const GyroNoiseSpec& noise, std::mt19937_64& rng,
                      std::int64_t timestamp) {
    GyroReading g;
    g.timestamp = timestamp;
    const Vec3 truth = state.rates_deg();
    std::normal_distribution<double> n(0.0, 1.0);
    for (std::size_t i = 0; i < 3; ++i) {
        g.rate[i] = truth[i] + noise.bias[i];
        if (noise.std_dev > 0.0) g.rate[i] += noise.std_dev * n(rng);
    }
    return g;
}

WindProcess::WindProcess(WindSpec spec) : spec_(spec), rng_(spec.seed) { spec_.validate(); }

Vec3 WindProcess::step(double dt) {
    if (!spec_.enabled) return torque_;
    const double decay = dt / spec_.tau;
    const double drive = std::sqrt(2.0 * dt / spec_.tau);
    for (std::size_t i = 0; i < 3; ++i) {
        torque_[i] += -torque_[i] * decay + spec_.sigma[i] * drive * normal_(rng_);
    }
    return torque_;
}

Simulator::Simulator(VehicleParams vehicle, FaultSpec faults, GyroNoiseSpec noise, WindSpec wind,
                     double initial_motor)
    : vehicle_(std::move(vehicle)),
      faults_(faults),
      noise_(noise),
      gyro_rng_(noise.seed),
      wind_(wind) {
    vehicle_.validate();
    faults_.validate();
    noise_.validate();
    state_.motor.fill(std::clamp(initial_motor, 0.0, 1.0));
}

GyroReading Simulator::read_gyro() { return mfc::read_gyro(state_, noise_, gyro_rng_, samples_++); }

void Simulator::step(const MotorCommands& motors, double dt) {
    const Vec3 wind = wind_.step(dt);
    state_ = sim_step(state_, motors, dt, vehicle_, faults_, wind);
}

VehicleParams vehicle_preset(std::string_view name) {
    VehicleParams v;
    if (name == "f450-analog") {
        v.name = "f450-analog";
        v.inertia = {0.0095, 0.0105, 0.019};
        v.arm_length = 0.225;
        v.thrust_coeff = 12.0;
        v.torque_coeff = 0.3;
        v.motor_tau = 0.025;
        v.yaw_drag = 0.0004;
    } else if (name == "tarot-analog") {
        v.name = "tarot-analog";
        v.inertia = {0.07, 0.075, 0.13};
        v.arm_length = 0.325;
        v.thrust_coeff = 22.0;
        v.torque_coeff = 0.9;
        v.motor_tau = 0.05;
        v.yaw_drag = 0.003;
    } else {
        throw ConfigError("unknown vehicle preset '" + std::string(name) + "'");
    }
    return v;
}

FaultSpec fault_preset(std::string_view name, const VehicleParams& vehicle) {
    FaultSpec f;
    if (name == "none") {
        return f;
    }
    if (name == "damaged-props") {
        f.prop_effectiveness = {0.55, 0.5, 0.6, 0.5};
        // 15% of the roll torque available from a full-range axis command.
        f.imbalance_amp =
            0.15 * vehicle.arm_length * vehicle.thrust_coeff * 2.0 * kDefaultAxisSaturation;
        f.imbalance_freq = 30.0;
        f.onset_time = 0.0;
        return f;
    }
    if (name == "stuck-gear") {
        f.static_torque = {0.15, -0.1, 0.0};
        return f;
    }
    throw ConfigError("unknown fault preset '" + std::string(name) + "'");
}

std::vector<std::string> vehicle_preset_names() { return {"f450-analog", "tarot-analog"}; }

std::vector<std::string> fault_preset_names() { return {"none", "damaged-props", "stuck-gear"}; }

}  // namespace mfc
