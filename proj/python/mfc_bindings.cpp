#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include <optional>
#include <string>

#include "mfc/attitude_controller.hpp"
#include "mfc/config_file.hpp"
#include "mfc/harness.hpp"
#include "mfc/ultra_local.hpp"

namespace py = pybind11;
using namespace mfc;

namespace {

py::dict result_dict(const ScenarioResult& r) {
    py::dict d;
    d["name"] = r.name;
    d["vehicle"] = r.vehicle;
    d["controller"] = r.controller;
    d["mae"] = r.mae;
    d["saturation_fraction"] = r.saturation_fraction;
    d["diverged"] = r.diverged;
    d["controller_fault"] = r.controller_fault;
    d["diagnostic"] = r.diagnostic;
    py::dict cols;
    std::array<std::vector<double>, kTelemetryColumns.size()> data;
    for (auto& c : data) c.reserve(r.telemetry.size());
    for (const TelemetryRow& row : r.telemetry) {
        const auto flat = row.flatten();
        for (std::size_t i = 0; i < flat.size(); ++i) data[i].push_back(flat[i]);
    }
    for (std::size_t i = 0; i < data.size(); ++i) cols[py::str(std::string(kTelemetryColumns[i]))] = data[i];
    d["telemetry"] = cols;
    return d;
}

ControllerSpec resolve_controller(const std::string& name_or_path) {
    for (const auto& n : controller_preset_names())
        if (n == name_or_path) return controller_preset(n);
    return load_controller_config(name_or_path);
}

}  // namespace

PYBIND11_MODULE(_mfcflight, m) {
    m.doc() = "Model-free rate control and quadrotor attitude simulation";

    py::class_<UltraLocalConfig>(m, "UltraLocalConfig")
        .def(py::init<>())
        .def_readwrite("order", &UltraLocalConfig::order)
        .def_readwrite("alpha", &UltraLocalConfig::alpha)
        .def_readwrite("sample_period", &UltraLocalConfig::sample_period)
        .def_readwrite("window_len", &UltraLocalConfig::window_len)
        .def_readwrite("kp", &UltraLocalConfig::kp)
        .def_readwrite("kd", &UltraLocalConfig::kd)
        .def("validate", &UltraLocalConfig::validate);

    py::class_<AxisControllerState>(m, "AxisControllerState")
        .def(py::init<int>(), py::arg("window_len") = 5)
        .def("reset", &AxisControllerState::reset)
        .def("f_hat", &AxisControllerState::f_hat)
        .def("filled", &AxisControllerState::filled)
        .def("capacity", &AxisControllerState::capacity);

    m.def("estimate_f", &estimate_f, py::arg("state"), py::arg("config"), py::arg("y_deriv_m"),
          py::arg("u_prev"));

    m.def(
        "ipd_step",
        [](const UltraLocalConfig& c, double f_hat, double y, double y_dot, double y_ref, double y_ref_dot,
           double y_ref_ddot) {
            return ipd_step(ControlStepInput{y, y_dot, y_ref, y_ref_dot, y_ref_ddot, 0.0}, f_hat, c);
        },
        py::arg("config"), py::arg("f_hat"), py::arg("y"), py::arg("y_dot"), py::arg("y_ref") = 0.0,
        py::arg("y_ref_dot") = 0.0, py::arg("y_ref_ddot") = 0.0);

    m.def(
        "ip_step",
        [](const UltraLocalConfig& c, double f_hat, double y, double y_ref, double y_ref_dot) {
            return ip_step(ControlStepInput{y, 0.0, y_ref, y_ref_dot, 0.0, 0.0}, f_hat, c);
        },
        py::arg("config"), py::arg("f_hat"), py::arg("y"), py::arg("y_ref") = 0.0, py::arg("y_ref_dot") = 0.0);

    m.def(
        "mix",
        [](double thrust, double roll, double pitch, double yaw, bool clamp) {
            return (clamp ? mix(thrust, roll, pitch, yaw) : mix_unclamped(thrust, roll, pitch, yaw)).u;
        },
        py::arg("thrust"), py::arg("roll"), py::arg("pitch"), py::arg("yaw"), py::arg("clamp") = true);

    m.def("vehicle_presets", &vehicle_preset_names);
    m.def("controller_presets", &controller_preset_names);
    m.def("fault_presets", &fault_preset_names);
    m.def("telemetry_columns", [] {
        std::vector<std::string> out;
        for (auto c : kTelemetryColumns) out.emplace_back(c);
        return out;
    });

    m.def(
        "run_scenario",
        [](const std::string& vehicle, const std::string& controller, const std::string& reference,
           const std::string& faults, std::uint64_t seed, double duration, bool wind,
           std::optional<double> noise_std, double throttle) {
            Scenario s = make_scenario("python", vehicle, "mfc-default", reference, faults, seed);
            s.controller = resolve_controller(controller);
            s.duration = duration;
            s.wind.enabled = wind;
            if (noise_std) s.noise.std_dev = *noise_std;
            s.throttle = throttle;
            s.validate();
            ScenarioResult r;
            {
                py::gil_scoped_release release;
                r = run_scenario(s);
            }
            return result_dict(r);
        },
        py::arg("vehicle") = "f450-analog", py::arg("controller") = "mfc-default",
        py::arg("reference") = "doublet", py::arg("faults") = "none", py::arg("seed") = 1,
        py::arg("duration") = 10.0, py::arg("wind") = true, py::arg("noise_std") = py::none(),
        py::arg("throttle") = 0.5);

    m.def(
        "run_campaign",
        [](const std::filesystem::path& path, int jobs) {
            const auto scenarios = load_campaign(path);
            CampaignResult c;
            {
                py::gil_scoped_release release;
                c = run_campaign(scenarios, jobs);
            }
            py::list out;
            for (const auto& r : c.results) out.append(result_dict(r));
            return out;
        },
        py::arg("path"), py::arg("jobs") = 1);

    m.def(
        "controller_config",
        [](const std::string& name_or_path) { return format_controller_config(resolve_controller(name_or_path)); },
        py::arg("name_or_path"));
}
