#pragma once

// Closed-loop scenarios, campaigns, summary tables and the PID grid tuner.

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "mfc/config_file.hpp"
#include "mfc/quad_sim.hpp"
#include "mfc/telemetry.hpp"

namespace mfc {

inline constexpr double kDivergenceRate = 2000.0;  // deg/s

struct Scenario {
    std::string name = "scenario";
    VehicleParams vehicle = vehicle_preset("f450-analog");
    ControllerSpec controller{};
    std::string reference = "doublet";
    std::string fault_label = "none";
    FaultSpec faults{};
    WindSpec wind{};
    GyroNoiseSpec noise{};
    double throttle = 0.5;
    double duration = 10.0;  // s
    std::uint64_t seed = 1;

    /// Sets the gyro seed to `seed` and the wind seed to `seed + 1000`.
    void reseed(std::uint64_t s);
    std::size_t steps() const;
    /// Checks every field and that the reference program resolves.
    void validate() const;
};

/// Builds a scenario from preset names with default noise, wind on, 10 s.
Scenario make_scenario(std::string name, std::string_view vehicle, std::string_view controller,
                       std::string reference, std::string_view faults = "none",
                       std::uint64_t seed = 1);

struct ScenarioResult {
    std::string name;
    std::string vehicle;
    std::string controller;
    std::vector<TelemetryRow> telemetry;
    Vec3 mae{};
    Vec3 saturation_fraction{};
    bool diverged = false;
    bool controller_fault = false;
    std::string diagnostic;

    double total_mae() const { return mae[0] + mae[1] + mae[2]; }
};

/// Deterministic closed loop. Divergence (|true rate| > 2000 deg/s or a
/// non-finite plant) stops the run early and sets `diverged`.
ScenarioResult run_scenario(const Scenario& s);

struct SummaryRow {
    std::string vehicle;
    std::string controller;
    int scenarios = 0;
    int diverged = 0;
    Vec3 mae{};  // mean over the group's scenarios

    double total() const { return mae[0] + mae[1] + mae[2]; }
    bool operator==(const SummaryRow&) const = default;
};

struct CampaignResult {
    std::vector<ScenarioResult> results;
    std::vector<SummaryRow> table;

    bool any_diverged() const;
};

/// Groups by (vehicle, controller) in first-appearance order.
std::vector<SummaryRow> summarize(std::span<const ScenarioResult> results);
std::string format_summary(std::span<const SummaryRow> table);
std::string format_results(std::span<const ScenarioResult> results);

/// Validates every scenario first (ConfigError aborts before anything runs),
/// then runs them on up to `parallelism` threads. Result order matches input.
CampaignResult run_campaign(std::span<const Scenario> scenarios, int parallelism = 1);

/// Writes `<name>.csv` per scenario and `summary.csv` into `dir`.
void write_campaign(const CampaignResult& result, const std::filesystem::path& dir);

/// Scenario keys: name, vehicle, controller, reference, faults, wind, wind_seed,
/// wind_sigma, noise_std, gyro_bias, throttle, duration, seed. Keys before
/// the first [scenario NAME] section are defaults for all of them.
/// `vehicle`, `controller` and `faults` take a preset name or a file path
/// relative to `base_dir`.
std::vector<Scenario> parse_campaign(const ConfigDocument& doc,
                                     const std::filesystem::path& base_dir = ".");
std::vector<Scenario> load_campaign(const std::filesystem::path& path);

/// A single scenario from the top-level keys of `doc`.
Scenario parse_scenario(const ConfigDocument& doc, const std::filesystem::path& base_dir = ".");

/// Scenarios behind the built-in acceptance checks.
std::vector<Scenario> acceptance_campaign(std::uint64_t seed = 1);

struct PidTuneGrid {
    std::vector<double> kp{2e-3, 4e-3, 8e-3, 1.6e-2, 3.2e-2};
    std::vector<double> ki{1e-2, 4e-2, 1e-1};
    std::vector<double> kd{0.0, 1e-4, 4e-4, 1.6e-3};
    std::vector<double> yaw_kp{2e-3, 5e-3, 1e-2, 2e-2, 4e-2};
    std::vector<double> yaw_ki{1e-2, 4e-2, 1e-1, 2e-1};
    double duration = 8.0;
    std::uint64_t seed = 1;
};

struct PidTuneResult {
    ControllerSpec controller;
    double roll_mae = 0.0;
    double yaw_mae = 0.0;
    int evaluated = 0;
};

/// Roll/pitch gains minimize roll MAE for a roll doublet on tarot-analog with
/// the stuck-gear fault; yaw PI gains then minimize yaw MAE for a yaw doublet.
PidTuneResult tune_pid(const PidTuneGrid& grid = {}, int parallelism = 1);

}  // namespace mfc
