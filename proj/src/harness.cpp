#include "mfc/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <exception>
#include <fstream>
#include <map>
#include <sstream>
#include <thread>

#include "mfc/errors.hpp"
#include "mfc/reference.hpp"

namespace mfc {

namespace {

bool is_preset(std::string_view name, const std::vector<std::string>& names) {
    return std::find(names.begin(), names.end(), name) != names.end();
}

std::filesystem::path resolve(const std::filesystem::path& base, std::string_view value) {
    const std::filesystem::path p{std::string(value)};
    return p.is_absolute() ? p : base / p;
}

ControllerSpec resolve_controller(std::string_view value, const std::filesystem::path& base) {
    if (is_preset(value, controller_preset_names()) || value == "mfc" || value == "pid") {
        return controller_preset(value);
    }
    return load_controller_config(resolve(base, value));
}

VehicleParams resolve_vehicle(std::string_view value, const std::filesystem::path& base) {
    if (is_preset(value, vehicle_preset_names())) return vehicle_preset(value);
    return parse_vehicle_config(ConfigDocument::load(resolve(base, value)));
}

FaultSpec resolve_faults(std::string_view value, const VehicleParams& v,
                         const std::filesystem::path& base) {
    if (is_preset(value, fault_preset_names())) return fault_preset(value, v);
    return parse_fault_config(ConfigDocument::load(resolve(base, value)), v);
}

// Applies one scenario key. Vehicle-dependent fault presets are resolved by
// the caller once all keys are known.
void apply_key(Scenario& s, std::string& faults_value, bool& seed_set, const ConfigEntry& e,
               const std::filesystem::path& base) {
    const std::string& v = e.value;
    if (e.key == "name") s.name = v;
    else if (e.key == "vehicle") s.vehicle = resolve_vehicle(v, base);
    else if (e.key == "controller") s.controller = resolve_controller(v, base);
    else if (e.key == "reference") s.reference = v;
    else if (e.key == "faults") faults_value = v;
    else if (e.key == "wind") s.wind.enabled = parse_bool(v, e.key);
    else if (e.key == "wind_seed") s.wind.seed = static_cast<std::uint64_t>(parse_int(v, e.key));
    else if (e.key == "wind_sigma") s.wind.sigma = parse_vec3(v, e.key);
    else if (e.key == "noise_std") s.noise.std_dev = parse_real(v, e.key);
    else if (e.key == "gyro_bias") s.noise.bias = parse_vec3(v, e.key);
    else if (e.key == "throttle") s.throttle = parse_real(v, e.key);
    else if (e.key == "duration") s.duration = parse_real(v, e.key);
    else if (e.key == "seed") {
        const int seed = parse_int(v, e.key);
        if (seed < 0) throw ConfigError("seed must be >= 0");
        s.reseed(static_cast<std::uint64_t>(seed));
        seed_set = true;
    } else if (e.key == "parallelism") {
        // campaign-level setting, read by the CLI
    } else {
        throw ConfigError("unknown scenario key");
    }
}

Scenario build_scenario(const ConfigDocument& doc, const std::vector<const ConfigSection*>& layers,
                        const std::filesystem::path& base) {
    Scenario s;
    s.wind.enabled = true;
    s.reseed(1);
    std::string faults_value = "none";
    bool seed_set = false;
    // Seeds go first so an explicit wind_seed is not overwritten by reseed().
    for (const ConfigSection* sec : layers) {
        if (const ConfigEntry* e = sec->find("seed")) {
            try {
                apply_key(s, faults_value, seed_set, *e, base);
            } catch (const ConfigError& err) {
                doc.fail(*e, err.what());
            }
        }
    }
    for (const ConfigSection* sec : layers) {
        for (const ConfigEntry& e : sec->entries) {
            if (e.key == "seed") continue;
            try {
                apply_key(s, faults_value, seed_set, e, base);
            } catch (const ConfigError& err) {
                doc.fail(e, err.what());
            }
        }
    }
    s.fault_label = faults_value;
    try {
        s.faults = resolve_faults(faults_value, s.vehicle, base);
    } catch (const ConfigError& err) {
        throw ConfigError(doc.source() + ": faults: " + err.what());
    }
    return s;
}

}  // namespace

void Scenario::reseed(std::uint64_t s) {
    seed = s;
    noise.seed = s;
    wind.seed = s + 1000;
}

std::size_t Scenario::steps() const {
    return static_cast<std::size_t>(std::llround(duration / controller.dt()));
}

void Scenario::validate() const {
    const std::string where = "scenario '" + name + "': ";
    try {
        if (!std::isfinite(duration) || duration <= 0.0) throw ConfigError("duration must be > 0");
        if (!(throttle >= 0.0 && throttle <= 1.0)) throw ConfigError("throttle must be in [0, 1]");
        vehicle.validate();
        controller.validate();
        faults.validate();
        noise.validate();
        wind.validate();
        if (steps() == 0) throw ConfigError("duration is shorter than one control period");
        (void)ReferenceProgram::parse(reference);
    } catch (const ConfigError& e) {
        throw ConfigError(where + e.what());
    }
}

Scenario make_scenario(std::string name, std::string_view vehicle, std::string_view controller,
                       std::string reference, std::string_view faults, std::uint64_t seed) {
    Scenario s;
    s.name = std::move(name);
    s.vehicle = vehicle_preset(vehicle);
    s.controller = controller_preset(controller);
    s.reference = std::move(reference);
    s.fault_label = std::string(faults);
    s.faults = fault_preset(faults, s.vehicle);
    s.wind.enabled = true;
    s.reseed(seed);
    return s;
}

ScenarioResult run_scenario(const Scenario& s) {
    s.validate();
    ScenarioResult result;
    result.name = s.name;
    result.vehicle = s.vehicle.name;
    result.controller = s.controller.label;

    const double dt = s.controller.dt();
    const std::size_t n = s.steps();
    const std::vector<RateReference> refs = ReferenceProgram::parse(s.reference).sample(dt, n);
    auto controller = s.controller.make();
    Simulator sim(s.vehicle, s.faults, s.noise, s.wind, s.throttle);
    const Vec3 sat = controller->saturation();
    std::array<std::size_t, 3> saturated{};

    result.telemetry.reserve(n);
    for (std::size_t k = 0; k < n; ++k) {
        const GyroReading gyro = sim.read_gyro();
        const ControlOutput out = controller->step(refs[k], gyro, s.throttle);

        TelemetryRow row;
        row.t = static_cast<double>(k) * dt;
        row.ref = refs[k].rates();
        row.rate = gyro.rate;
        row.filt = out.filtered;
        row.fhat = out.f_hat;
        row.u = out.axis_command;
        row.motor = out.motors.u;
        result.telemetry.push_back(row);
        for (std::size_t i = 0; i < 3; ++i) {
            if (std::abs(out.axis_command[i]) >= sat[i]) ++saturated[i];
        }

        try {
            sim.step(out.motors, dt);
        } catch (const SimulationFault& e) {
            result.diverged = true;
            result.diagnostic = e.what();
            break;
        }
        const Vec3 w = sim.state().rates_deg();
        if (std::any_of(w.begin(), w.end(), [](double x) { return std::abs(x) > kDivergenceRate; })) {
            result.diverged = true;
            result.diagnostic = "body rate exceeded " + format_real(kDivergenceRate) +
                                " deg/s at t=" + format_real(sim.state().t);
            break;
        }
    }
    result.controller_fault = controller->faulted();
    result.mae = mean_abs_error(result.telemetry);
    const double rows = static_cast<double>(std::max<std::size_t>(result.telemetry.size(), 1));
    for (std::size_t i = 0; i < 3; ++i) {
        result.saturation_fraction[i] = static_cast<double>(saturated[i]) / rows;
    }
    return result;
}

bool CampaignResult::any_diverged() const {
    return std::any_of(results.begin(), results.end(), [](const auto& r) { return r.diverged; });
}

std::vector<SummaryRow> summarize(std::span<const ScenarioResult> results) {
    std::vector<SummaryRow> table;
    for (const ScenarioResult& r : results) {
        auto it = std::find_if(table.begin(), table.end(), [&](const SummaryRow& row) {
            return row.vehicle == r.vehicle && row.controller == r.controller;
        });
        if (it == table.end()) {
            table.push_back(SummaryRow{r.vehicle, r.controller});
            it = table.end() - 1;
        }
        ++it->scenarios;
        if (r.diverged) ++it->diverged;
        for (std::size_t i = 0; i < 3; ++i) it->mae[i] += r.mae[i];
    }
    for (SummaryRow& row : table) {
        for (double& m : row.mae) m /= static_cast<double>(row.scenarios);
    }
    return table;
}

std::string format_summary(std::span<const SummaryRow> table) {
    std::ostringstream out;
    char line[256];
    std::snprintf(line, sizeof line, "%-16s %-10s %5s %5s %10s %10s %10s %10s\n", "vehicle",
                  "controller", "runs", "div", "mae_roll", "mae_pitch", "mae_yaw", "total");
    out << line;
    for (const SummaryRow& r : table) {
        std::snprintf(line, sizeof line, "%-16s %-10s %5d %5d %10.3f %10.3f %10.3f %10.3f\n",
                      r.vehicle.c_str(), r.controller.c_str(), r.scenarios, r.diverged, r.mae[0],
                      r.mae[1], r.mae[2], r.total());
        out << line;
    }
    return out.str();
}

std::string format_results(std::span<const ScenarioResult> results) {
    std::ostringstream out;
    char line[320];
    std::snprintf(line, sizeof line, "%-32s %-14s %-6s %9s %9s %9s %6s\n", "scenario", "vehicle",
                  "ctrl", "mae_roll", "mae_pitch", "mae_yaw", "status");
    out << line;
    for (const ScenarioResult& r : results) {
        std::snprintf(line, sizeof line, "%-32s %-14s %-6s %9.3f %9.3f %9.3f %6s\n", r.name.c_str(),
                      r.vehicle.c_str(), r.controller.c_str(), r.mae[0], r.mae[1], r.mae[2],
                      r.diverged ? "DIVERGED" : "ok");
        out << line;
    }
    return out.str();
}

CampaignResult run_campaign(std::span<const Scenario> scenarios, int parallelism) {
    for (const Scenario& s : scenarios) s.validate();

    CampaignResult result;
    result.results.resize(scenarios.size());
    const std::size_t workers =
        std::min<std::size_t>(static_cast<std::size_t>(std::max(parallelism, 1)), scenarios.size());
    if (workers <= 1) {
        for (std::size_t i = 0; i < scenarios.size(); ++i) result.results[i] = run_scenario(scenarios[i]);
    } else {
        std::atomic<std::size_t> next{0};
        std::vector<std::exception_ptr> errors(scenarios.size());
        std::vector<std::jthread> pool;
        pool.reserve(workers);
        for (std::size_t w = 0; w < workers; ++w) {
            pool.emplace_back([&] {
                for (std::size_t i = next++; i < scenarios.size(); i = next++) {
                    try {
                        result.results[i] = run_scenario(scenarios[i]);
                    } catch (...) {
                        errors[i] = std::current_exception();
                    }
                }
            });
        }
        pool.clear();
        for (const auto& e : errors) {
            if (e) std::rethrow_exception(e);
        }
    }
    result.table = summarize(result.results);
    return result;
}

void write_campaign(const CampaignResult& result, const std::filesystem::path& dir) {
    std::filesystem::create_directories(dir);
    for (const ScenarioResult& r : result.results) {
        write_telemetry_csv(dir / (r.name + ".csv"), r.telemetry);
    }
    std::ofstream out(dir / "summary.csv", std::ios::binary);
    if (!out) throw ConfigError("cannot write " + (dir / "summary.csv").string());
    out << "scenario,vehicle,controller,mae_roll,mae_pitch,mae_yaw,sat_roll,sat_pitch,sat_yaw,diverged\n";
    for (const ScenarioResult& r : result.results) {
        out << r.name << ',' << r.vehicle << ',' << r.controller;
        for (double m : r.mae) out << ',' << format_real(m);
        for (double f : r.saturation_fraction) out << ',' << format_real(f);
        out << ',' << (r.diverged ? 1 : 0) << '\n';
    }
}

std::vector<Scenario> parse_campaign(const ConfigDocument& doc, const std::filesystem::path& base_dir) {
    std::vector<Scenario> out;
    for (const ConfigSection& sec : doc.sections()) {
        if (sec.line == 0) continue;
        if (sec.name != "scenario") {
            throw ConfigError(doc.source() + ":" + std::to_string(sec.line) + ": unknown section [" +
                              sec.name + "]");
        }
        Scenario s = build_scenario(doc, {&doc.global(), &sec}, base_dir);
        if (!sec.argument.empty() && !sec.find("name")) s.name = sec.argument;
        for (const Scenario& other : out) {
            if (other.name == s.name) {
                throw ConfigError(doc.source() + ":" + std::to_string(sec.line) +
                                  ": duplicate scenario name '" + s.name + "'");
            }
        }
        out.push_back(std::move(s));
    }
    for (const Scenario& s : out) s.validate();
    return out;
}

std::vector<Scenario> load_campaign(const std::filesystem::path& path) {
    return parse_campaign(ConfigDocument::load(path), path.parent_path());
}

Scenario parse_scenario(const ConfigDocument& doc, const std::filesystem::path& base_dir) {
    if (doc.sections().size() > 1) {
        const ConfigSection& sec = doc.sections()[1];
        if (doc.sections().size() > 2 || sec.name != "scenario") {
            throw ConfigError(doc.source() + ": a scenario file holds top-level keys or one [scenario] section");
        }
        Scenario s = build_scenario(doc, {&doc.global(), &sec}, base_dir);
        if (!sec.argument.empty() && !sec.find("name")) s.name = sec.argument;
        s.validate();
        return s;
    }
    Scenario s = build_scenario(doc, {&doc.global()}, base_dir);
    s.validate();
    return s;
}

std::vector<Scenario> acceptance_campaign(std::uint64_t seed) {
    return {
        make_scenario("f450-mfc-doublet", "f450-analog", "mfc-default", "doublet", "none", seed),
        make_scenario("f450-mfc-acro", "f450-analog", "mfc-default", "acro-script", "none", seed),
        make_scenario("f450-mfc-damaged-doublet", "f450-analog", "mfc-default", "doublet", "damaged-props", seed),
        make_scenario("f450-mfc-damaged-acro", "f450-analog", "mfc-default", "acro-script", "damaged-props", seed),
        make_scenario("tarot-mfc-gear-doublet", "tarot-analog", "mfc-default", "doublet", "stuck-gear", seed),
        make_scenario("tarot-mfc-gear-acro", "tarot-analog", "mfc-default", "acro-script", "stuck-gear", seed),
        make_scenario("f450-pid-acro", "f450-analog", "pid-tarot", "acro-script", "none", seed),
        make_scenario("f450-pid-acro-pitch-yaw", "f450-analog", "pid-tarot", "acro-script:pitch,yaw", "none", seed),
    };
}

PidTuneResult tune_pid(const PidTuneGrid& grid, int parallelism) {
    auto candidate = [](const PidConfig& rp, const PidConfig& yaw) {
        ControllerSpec spec = controller_preset("pid-tarot");
        spec.pid[Axis::roll].gains = rp;
        spec.pid[Axis::pitch].gains = rp;
        spec.pid[Axis::yaw].gains = yaw;
        return spec;
    };
    auto tuning_scenario = [&](std::string name, std::string reference, ControllerSpec spec) {
        Scenario s = make_scenario(std::move(name), "tarot-analog", "pid-tarot", std::move(reference),
                                   "stuck-gear", grid.seed);
        s.controller = std::move(spec);
        s.duration = grid.duration;
        return s;
    };
    const PidConfig base = controller_preset("pid-tarot").pid[Axis::roll].gains;
    const PidConfig yaw_seed{2e-3, 5e-3, 0.0, base.integral_limit, base.deriv_filter_tau};

    std::vector<Scenario> roll_runs;
    std::vector<PidConfig> roll_gains;
    for (double kp : grid.kp) {
        for (double ki : grid.ki) {
            for (double kd : grid.kd) {
                PidConfig g{kp, ki, kd, base.integral_limit, base.deriv_filter_tau};
                if (kp == 0.0 && ki == 0.0 && kd == 0.0) continue;
                roll_gains.push_back(g);
                roll_runs.push_back(tuning_scenario("tune-roll-" + std::to_string(roll_runs.size()),
                                                    "doublet", candidate(g, yaw_seed)));
            }
        }
    }
    const CampaignResult roll = run_campaign(roll_runs, parallelism);

    PidTuneResult best;
    std::optional<std::size_t> best_roll;
    for (std::size_t i = 0; i < roll.results.size(); ++i) {
        const auto& r = roll.results[i];
        if (r.diverged) continue;
        if (!best_roll || r.mae[0] < roll.results[*best_roll].mae[0]) best_roll = i;
    }
    if (!best_roll) throw ConfigError("every roll/pitch PID candidate diverged");
    best.roll_mae = roll.results[*best_roll].mae[0];

    std::vector<Scenario> yaw_runs;
    std::vector<PidConfig> yaw_gains;
    for (double kp : grid.yaw_kp) {
        for (double ki : grid.yaw_ki) {
            if (kp == 0.0 && ki == 0.0) continue;
            PidConfig g{kp, ki, 0.0, base.integral_limit, base.deriv_filter_tau};
            yaw_gains.push_back(g);
            yaw_runs.push_back(tuning_scenario("tune-yaw-" + std::to_string(yaw_runs.size()),
                                               "doublet:yaw", candidate(roll_gains[*best_roll], g)));
        }
    }
    const CampaignResult yaw = run_campaign(yaw_runs, parallelism);
    std::optional<std::size_t> best_yaw;
    for (std::size_t i = 0; i < yaw.results.size(); ++i) {
        const auto& r = yaw.results[i];
        if (r.diverged) continue;
        if (!best_yaw || r.mae[2] < yaw.results[*best_yaw].mae[2]) best_yaw = i;
    }
    if (!best_yaw) throw ConfigError("every yaw PI candidate diverged");
    best.yaw_mae = yaw.results[*best_yaw].mae[2];
    best.controller = candidate(roll_gains[*best_roll], yaw_gains[*best_yaw]);
    best.evaluated = static_cast<int>(roll_runs.size() + yaw_runs.size());
    return best;
}

}  // namespace mfc
