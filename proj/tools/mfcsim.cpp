// mfcsim: run scenarios and campaigns, dump presets, tune the PID baseline.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "mfc/config_file.hpp"
#include "mfc/errors.hpp"
#include "mfc/harness.hpp"
#include "mfc/reference.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitDiverged = 1;
constexpr int kExitConfig = 2;

struct Common {
    std::optional<std::uint64_t> seed;
    std::optional<double> duration;
    std::string out;
    std::string config;
};

void apply_overrides(mfc::Scenario& s, const Common& c) {
    if (c.seed) s.reseed(*c.seed);
    if (c.duration) s.duration = *c.duration;
}

void print_result(const mfc::ScenarioResult& r) {
    std::cout << mfc::format_results(std::span(&r, 1));
    if (r.diverged) std::cout << "diverged: " << r.diagnostic << "\n";
    if (r.controller_fault) std::cout << "controller entered fail-neutral on a non-finite input\n";
}

void write_text(const std::filesystem::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw mfc::ConfigError("cannot write '" + path.string() + "'");
    out << text;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Model-free quadrotor rate control simulator"};
    app.require_subcommand(1);

    Common run_opts;
    std::string vehicle = "f450-analog";
    std::string controller = "mfc-default";
    std::string reference = "doublet";
    std::string faults = "none";
    bool no_wind = false;
    std::optional<double> noise_std;
    auto* run = app.add_subcommand("run", "Run a single scenario");
    run->add_option("--config", run_opts.config, "Scenario file (key = value)");
    run->add_option("--seed", run_opts.seed, "Seed for gyro noise and wind");
    run->add_option("--duration", run_opts.duration, "Duration in seconds");
    run->add_option("--out", run_opts.out, "Telemetry CSV path");
    run->add_option("--vehicle", vehicle, "Vehicle preset or file")->capture_default_str();
    run->add_option("--controller", controller, "Controller preset or file")->capture_default_str();
    run->add_option("--reference", reference, "Reference program, e.g. doublet, acro-script:pitch,yaw")
        ->capture_default_str();
    run->add_option("--faults", faults, "Fault preset or file")->capture_default_str();
    run->add_flag("--no-wind", no_wind, "Disable the wind torque");
    run->add_option("--noise-std", noise_std, "Gyro noise standard deviation, deg/s");

    Common camp_opts;
    int jobs = 1;
    bool builtin = false;
    auto* campaign = app.add_subcommand("campaign", "Run a list of scenarios");
    campaign->add_option("--config", camp_opts.config, "Campaign file with [scenario NAME] sections");
    campaign->add_flag("--acceptance", builtin, "Use the built-in acceptance campaign");
    campaign->add_option("--seed", camp_opts.seed, "Override every scenario seed");
    campaign->add_option("--duration", camp_opts.duration, "Override every scenario duration");
    campaign->add_option("--out", camp_opts.out, "Output directory for per-scenario CSV and summary.csv");
    campaign->add_option("--jobs", jobs, "Scenarios run in parallel")->capture_default_str();

    Common preset_opts;
    auto* presets = app.add_subcommand("presets", "Print or write the built-in presets");
    presets->add_option("--out", preset_opts.out, "Directory to write preset files into");

    Common tune_opts;
    auto* tune = app.add_subcommand("tune-pid", "Grid-search PID gains on tarot-analog");
    tune->add_option("--seed", tune_opts.seed, "Seed for the tuning runs");
    tune->add_option("--duration", tune_opts.duration, "Seconds per tuning run");
    tune->add_option("--out", tune_opts.out, "Write the tuned controller config here");
    tune->add_option("--jobs", jobs, "Runs in parallel");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : 2;
    }

    try {
        if (*run) {
            mfc::Scenario s;
            if (!run_opts.config.empty()) {
                const std::filesystem::path p(run_opts.config);
                s = mfc::parse_scenario(mfc::ConfigDocument::load(p), p.parent_path());
            } else {
                const mfc::ConfigDocument doc = mfc::ConfigDocument::parse(
                    "vehicle = " + vehicle + "\ncontroller = " + controller + "\nreference = " +
                        reference + "\nfaults = " + faults + "\nwind = " + (no_wind ? "off" : "on") + "\n",
                    "<command line>");
                s = mfc::parse_scenario(doc, ".");
                s.name = "run";
            }
            if (noise_std) s.noise.std_dev = *noise_std;
            apply_overrides(s, run_opts);
            const mfc::ScenarioResult r = mfc::run_scenario(s);
            print_result(r);
            if (!run_opts.out.empty()) mfc::write_telemetry_csv(run_opts.out, r.telemetry);
            return r.diverged ? kExitDiverged : kExitOk;
        }

        if (*campaign) {
            std::vector<mfc::Scenario> list;
            if (builtin) {
                list = mfc::acceptance_campaign();
            } else if (!camp_opts.config.empty()) {
                const std::filesystem::path p(camp_opts.config);
                const mfc::ConfigDocument doc = mfc::ConfigDocument::load(p);
                list = mfc::parse_campaign(doc, p.parent_path());
                if (const auto* e = doc.global().find("parallelism"); e && jobs == 1) {
                    jobs = mfc::parse_int(e->value, "parallelism");
                }
            } else {
                throw mfc::ConfigError("campaign needs --config FILE or --acceptance");
            }
            for (auto& s : list) apply_overrides(s, camp_opts);
            const mfc::CampaignResult r = mfc::run_campaign(list, jobs);
            std::cout << mfc::format_results(r.results) << "\n" << mfc::format_summary(r.table);
            if (!camp_opts.out.empty()) mfc::write_campaign(r, camp_opts.out);
            return r.any_diverged() ? kExitDiverged : kExitOk;
        }

        if (*presets) {
            std::string all;
            for (const auto& name : mfc::vehicle_preset_names()) {
                const std::string text = "# vehicle preset " + name + "\n" +
                                         mfc::format_vehicle_config(mfc::vehicle_preset(name));
                all += text + "\n";
                if (!preset_opts.out.empty()) {
                    std::filesystem::create_directories(preset_opts.out);
                    write_text(std::filesystem::path(preset_opts.out) / ("vehicle-" + name + ".cfg"), text);
                }
            }
            const mfc::VehicleParams f450 = mfc::vehicle_preset("f450-analog");
            for (const auto& name : mfc::fault_preset_names()) {
                const std::string text = "# fault preset " + name + " (amplitudes for f450-analog)\n" +
                                         mfc::format_fault_config(mfc::fault_preset(name, f450));
                all += text + "\n";
                if (!preset_opts.out.empty()) {
                    write_text(std::filesystem::path(preset_opts.out) / ("faults-" + name + ".cfg"), text);
                }
            }
            for (const auto& name : mfc::controller_preset_names()) {
                const std::string text = "# controller preset " + name + "\n" +
                                         mfc::format_controller_config(mfc::controller_preset(name));
                all += text + "\n";
                if (!preset_opts.out.empty()) {
                    write_text(std::filesystem::path(preset_opts.out) / ("controller-" + name + ".cfg"), text);
                }
            }
            all += "# reference programs: zero, doublet, chirp, acro-script, replay=FILE; "
                   "append :roll,pitch,yaw to choose axes\n";
            std::cout << all;
            return kExitOk;
        }

        if (*tune) {
            mfc::PidTuneGrid grid;
            if (tune_opts.seed) grid.seed = *tune_opts.seed;
            if (tune_opts.duration) grid.duration = *tune_opts.duration;
            const mfc::PidTuneResult r = mfc::tune_pid(grid, jobs);
            const std::string text = mfc::format_controller_config(r.controller);
            std::cout << "# " << r.evaluated << " runs, roll MAE " << r.roll_mae << " deg/s, yaw MAE "
                      << r.yaw_mae << " deg/s\n"
                      << text;
            if (!tune_opts.out.empty()) write_text(tune_opts.out, text);
            return kExitOk;
        }
    } catch (const mfc::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitConfig;
    }
    return kExitOk;
}
