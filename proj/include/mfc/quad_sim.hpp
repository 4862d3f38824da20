#pragma once

// Rotational quadrotor plant: first-order motors, linear thrust and reaction
// torque, diagonal-inertia Euler dynamics, gyro and wind models.

#include <array>
#include <cstdint>
#include <random>
#include <string>
#include <string_view>
#include <vector>

#include "mfc/types.hpp"

namespace mfc {

inline constexpr double kRadToDeg = 57.29577951308232;
inline constexpr double kDegToRad = 1.0 / kRadToDeg;

struct VehicleParams {
    std::string name = "custom";
    Vec3 inertia{0.01, 0.01, 0.02};  // kg m^2 about roll, pitch, yaw
    double arm_length = 0.2;         // m, motor axis to roll/pitch axis
    double thrust_coeff = 10.0;      // N per unit command
    double torque_coeff = 0.2;       // N m per unit command
    double motor_tau = 0.02;         // s
    double yaw_drag = 0.0;           // N m per deg/s
    bool rate_cross_coupling = true;

    void validate() const;
};

struct FaultSpec {
    std::array<double, 4> prop_effectiveness{1.0, 1.0, 1.0, 1.0};
    double imbalance_amp = 0.0;   // N m
    double imbalance_freq = 0.0;  // Hz
    double onset_time = 0.0;      // s
    Vec3 static_torque{};         // N m, constant after onset (e.g. a snagged gear leg)

    void validate() const;
};

struct GyroNoiseSpec {
    double std_dev = 1.5;  // deg/s
    Vec3 bias{};           // deg/s
    std::uint64_t seed = 1;

    void validate() const;
};

/// Ornstein-Uhlenbeck torque per axis.
struct WindSpec {
    bool enabled = false;
    Vec3 sigma{0.03, 0.03, 0.01};  // N m, stationary standard deviation
    double tau = 1.0;              // s, correlation time
    std::uint64_t seed = 1;

    void validate() const;
};

struct SimState {
    Vec3 omega{};                 // rad/s, body frame
    std::array<double, 4> motor{};  // lagged motor levels
    double t = 0.0;

    Vec3 rates_deg() const {
        return {omega[0] * kRadToDeg, omega[1] * kRadToDeg, omega[2] * kRadToDeg};
    }
};

/// Body torque (N m) produced by motor levels `motor` on `vehicle` with `faults` active.
Vec3 motor_torque(const VehicleParams& vehicle, const std::array<double, 4>& motor,
                  const FaultSpec& faults, double t, const Vec3& omega);

/// One semi-implicit Euler step: motors lag toward `motors`, then omega is
/// advanced with the torque from the new motor levels plus `external_torque`.
/// Throws SimulationFault if the result is not finite.
SimState sim_step(const SimState& state, const MotorCommands& motors, double dt,
                  const VehicleParams& vehicle, const FaultSpec& faults,
                  const Vec3& external_torque = {});

/// True rates plus bias plus seeded Gaussian noise.
GyroReading read_gyro(const SimState& state, const GyroNoiseSpec& noise, std::mt19937_64& rng,
                      std::int64_t timestamp = 0);

class WindProcess {
public:
    explicit WindProcess(WindSpec spec);
    /// Advances one step and returns the torque for it (zero when disabled).
    Vec3 step(double dt);
    const Vec3& torque() const { return torque_; }

private:
    WindSpec spec_;
    std::mt19937_64 rng_;
    std::normal_distribution<double> normal_{0.0, 1.0};
    Vec3 torque_{};
};

/// Plant, gyro and wind bundled with their generators.
class Simulator {
public:
    Simulator(VehicleParams vehicle, FaultSpec faults, GyroNoiseSpec noise, WindSpec wind,
              double initial_motor = 0.0);

    GyroReading read_gyro();
    void step(const MotorCommands& motors, double dt);

    const SimState& state() const { return state_; }
    const VehicleParams& vehicle() const { return vehicle_; }

private:
    VehicleParams vehicle_;
    FaultSpec faults_;
    GyroNoiseSpec noise_;
    SimState state_;
    std::mt19937_64 gyro_rng_;
    WindProcess wind_;
    std::int64_t samples_ = 0;
};

VehicleParams vehicle_preset(std::string_view name);
FaultSpec fault_preset(std::string_view name, const VehicleParams& vehicle);
std::vector<std::string> vehicle_preset_names();
std::vector<std::string> fault_preset_names();

}  // namespace mfc
