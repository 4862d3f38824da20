#include "mfc/config_file.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "mfc/errors.hpp"

namespace mfc {

namespace {

std::string_view trim(std::string_view s) {
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
    return s;
}

std::string lower(std::string_view s) {
    std::string out(s);
    std::transform(out.begin(), out.end(), out.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return out;
}

std::vector<std::string_view> split_list(std::string_view text) {
    std::vector<std::string_view> parts;
    while (true) {
        const auto comma = text.find(',');
        parts.push_back(trim(text.substr(0, comma)));
        if (comma == std::string_view::npos) break;
        text.remove_prefix(comma + 1);
    }
    return parts;
}

template <std::size_t N>
std::array<double, N> parse_fixed(std::string_view text, std::string_view what) {
    const auto parts = split_list(text);
    if (parts.size() != N) {
        throw ConfigError(std::string(what) + ": expected " + std::to_string(N) +
                          " comma-separated numbers, got '" + std::string(text) + "'");
    }
    std::array<double, N> out{};
    for (std::size_t i = 0; i < N; ++i) out[i] = parse_real(parts[i], what);
    return out;
}

template <std::size_t N>
std::string format_list(const std::array<double, N>& v) {
    std::string s;
    for (std::size_t i = 0; i < N; ++i) {
        if (i) s += ", ";
        s += format_real(v[i]);
    }
    return s;
}

bool is_axis_section(std::string_view name) {
    return name == "roll" || name == "pitch" || name == "yaw";
}

Axis section_axis(std::string_view name) {
    if (name == "roll") return Axis::roll;
    if (name == "pitch") return Axis::pitch;
    return Axis::yaw;
}

// Runs `apply(entry)` for each entry and rethrows ConfigErrors with a location.
template <class F>
void for_each_entry(const ConfigDocument& doc, const ConfigSection& sec, F&& apply) {
    for (const ConfigEntry& e : sec.entries) {
        try {
            apply(e);
        } catch (const ConfigError& err) {
            doc.fail(e, err.what());
        }
    }
}

}  // namespace

const ConfigEntry* ConfigSection::find(std::string_view key) const {
    for (const auto& e : entries) {
        if (e.key == key) return &e;
    }
    return nullptr;
}

ConfigDocument ConfigDocument::parse(std::string_view text, std::string source) {
    ConfigDocument doc;
    doc.source_ = std::move(source);
    doc.sections_.push_back(ConfigSection{});

    int line_no = 0;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        const auto nl = text.find('\n', pos);
        std::string_view line =
            text.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos);
        pos = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
        ++line_no;

        if (const auto hash = line.find('#'); hash != std::string_view::npos) {
            line = line.substr(0, hash);
        }
        line = trim(line);
        if (line.empty()) continue;

        const std::string where = doc.source_ + ":" + std::to_string(line_no) + ": ";
        if (line.front() == '[') {
            if (line.back() != ']') throw ConfigError(where + "unterminated section header");
            std::string_view inner = trim(line.substr(1, line.size() - 2));
            if (inner.empty()) throw ConfigError(where + "empty section name");
            ConfigSection sec;
            const auto space = inner.find_first_of(" \t");
            sec.name = lower(inner.substr(0, space));
            if (space != std::string_view::npos) sec.argument = trim(inner.substr(space));
            sec.line = line_no;
            for (const auto& other : doc.sections_) {
                if (other.name == sec.name && other.argument == sec.argument && other.line != 0) {
                    throw ConfigError(where + "duplicate section [" + std::string(inner) + "]");
                }
            }
            doc.sections_.push_back(std::move(sec));
            continue;
        }

        const auto eq = line.find('=');
        if (eq == std::string_view::npos) {
            throw ConfigError(where + "expected 'key = value', got '" + std::string(line) + "'");
        }
        ConfigEntry entry{lower(trim(line.substr(0, eq))), std::string(trim(line.substr(eq + 1))),
                          line_no};
        if (entry.key.empty()) throw ConfigError(where + "missing key before '='");
        if (entry.value.empty()) throw ConfigError(where + "missing value for '" + entry.key + "'");
        ConfigSection& sec = doc.sections_.back();
        if (sec.find(entry.key)) throw ConfigError(where + "duplicate key '" + entry.key + "'");
        sec.entries.push_back(std::move(entry));
    }
    return doc;
}

ConfigDocument ConfigDocument::load(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot open config file '" + path.string() + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse(ss.str(), path.string());
}

const ConfigSection* ConfigDocument::find(std::string_view name) const {
    for (const auto& s : sections_) {
        if (s.line != 0 && s.name == name) return &s;
    }
    return nullptr;
}

void ConfigDocument::fail(const ConfigEntry& e, const std::string& message) const {
    throw ConfigError(source_ + ":" + std::to_string(e.line) + ": " + e.key + ": " + message);
}

double parse_real(std::string_view text, std::string_view what) {
    text = trim(text);
    if (!text.empty() && text.front() == '+') text.remove_prefix(1);
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
    if (ec != std::errc{} || ptr != text.data() + text.size() || text.empty()) {
        throw ConfigError(std::string(what) + ": not a number: '" + std::string(text) + "'");
    }
    if (!std::isfinite(v)) {
        throw ConfigError(std::string(what) + ": value must be finite");
    }
    return v;
}

int parse_int(std::string_view text, std::string_view what) {
    text = trim(text);
    int v = 0;
    const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
    if (ec != std::errc{} || ptr != text.data() + text.size() || text.empty()) {
        throw ConfigError(std::string(what) + ": not an integer: '" + std::string(text) + "'");
    }
    return v;
}

bool parse_bool(std::string_view text, std::string_view what) {
    const std::string t = lower(trim(text));
    if (t == "on" || t == "true" || t == "yes" || t == "1") return true;
    if (t == "off" || t == "false" || t == "no" || t == "0") return false;
    throw ConfigError(std::string(what) + ": expected on/off, got '" + std::string(text) + "'");
}

Vec3 parse_vec3(std::string_view text, std::string_view what) { return parse_fixed<3>(text, what); }

std::array<double, 4> parse_vec4(std::string_view text, std::string_view what) {
    return parse_fixed<4>(text, what);
}

std::string format_real(double v) {
    char buf[64];
    const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, ptr);
}

std::unique_ptr<RateController> ControllerSpec::make() const {
    if (kind == ControllerKind::mfc) return std::make_unique<AttitudeController>(mfc);
    return std::make_unique<RatePid>(pid);
}

void ControllerSpec::validate() const {
    if (kind == ControllerKind::mfc) {
        mfc.validate();
    } else {
        pid.validate();
    }
}

ControllerSpec parse_controller_config(const ConfigDocument& doc) {
    ControllerSpec spec;
    if (const ConfigEntry* sel = doc.global().find("controller")) {
        const std::string kind = lower(sel->value);
        if (kind == "pid") {
            spec.kind = ControllerKind::pid;
            spec.label = "pid";
        } else if (kind != "mfc") {
            doc.fail(*sel, "expected 'mfc' or 'pid', got '" + sel->value + "'");
        }
    }
    if (spec.kind == ControllerKind::mfc) {
        spec.mfc = MfcConfig::defaults();
    } else {
        spec.pid = controller_preset("pid-tarot").pid;
    }

    std::optional<double> lambda;
    std::optional<double> loop_hz;
    auto shared_key = [&](const ConfigEntry& e) {
        std::optional<double>& slot = e.key == "lambda" ? lambda : loop_hz;
        const double v = parse_real(e.value, e.key);
        if (slot && *slot != v) throw ConfigError("conflicts with an earlier " + e.key + " value");
        slot = v;
    };

    for (const ConfigSection& sec : doc.sections()) {
        if (sec.line == 0) {
            for_each_entry(doc, sec, [&](const ConfigEntry& e) {
                if (e.key == "controller") return;
                if (e.key == "label") {
                    spec.label = e.value;
                } else if (e.key == "lambda" || e.key == "loop_hz") {
                    shared_key(e);
                } else {
                    throw ConfigError("unknown top-level key (axis keys belong in [roll], [pitch] or [yaw])");
                }
            });
            continue;
        }
        if (!is_axis_section(sec.name)) {
            throw ConfigError(doc.source() + ":" + std::to_string(sec.line) +
                              ": unknown section [" + sec.name + "]");
        }
        const Axis axis = section_axis(sec.name);
        for_each_entry(doc, sec, [&](const ConfigEntry& e) {
            if (e.key == "lambda" || e.key == "loop_hz") {
                shared_key(e);
                return;
            }
            if (spec.kind == ControllerKind::mfc) {
                MfcAxisSettings& s = spec.mfc[axis];
                if (e.key == "order") s.order = parse_int(e.value, e.key);
                else if (e.key == "alpha") s.alpha = parse_real(e.value, e.key);
                else if (e.key == "kp") s.kp = parse_real(e.value, e.key);
                else if (e.key == "kd") s.kd = parse_real(e.value, e.key);
                else if (e.key == "window_seconds") s.window_seconds = parse_real(e.value, e.key);
                else if (e.key == "sat") s.sat = parse_real(e.value, e.key);
                else if (e.key == "output_scale") s.output_scale = parse_real(e.value, e.key);
                else throw ConfigError("unknown MFC axis key");
            } else {
                PidAxisSettings& s = spec.pid[axis];
                if (e.key == "kp") s.gains.kp = parse_real(e.value, e.key);
                else if (e.key == "ki") s.gains.ki = parse_real(e.value, e.key);
                else if (e.key == "kd") s.gains.kd = parse_real(e.value, e.key);
                else if (e.key == "integral_limit") s.gains.integral_limit = parse_real(e.value, e.key);
                else if (e.key == "deriv_filter_tau") s.gains.deriv_filter_tau = parse_real(e.value, e.key);
                else if (e.key == "sat") s.sat = parse_real(e.value, e.key);
                else throw ConfigError("unknown PID axis key");
            }
        });
    }

    if (spec.kind == ControllerKind::mfc) {
        if (lambda) spec.mfc.lambda = *lambda;
        if (loop_hz) spec.mfc.loop_hz = *loop_hz;
    } else {
        if (lambda) spec.pid.lambda = *lambda;
        if (loop_hz) spec.pid.loop_hz = *loop_hz;
    }
    try {
        spec.validate();
    } catch (const ConfigError& e) {
        throw ConfigError(doc.source() + ": " + e.what());
    }
    return spec;
}

ControllerSpec load_controller_config(const std::filesystem::path& path) {
    return parse_controller_config(ConfigDocument::load(path));
}

std::string format_controller_config(const ControllerSpec& spec) {
    std::ostringstream out;
    if (spec.kind == ControllerKind::mfc) {
        out << "controller = mfc\n";
        out << "label = " << spec.label << "\n";
        out << "lambda = " << format_real(spec.mfc.lambda) << "\n";
        out << "loop_hz = " << format_real(spec.mfc.loop_hz) << "\n";
        for (Axis a : kAxes) {
            const MfcAxisSettings& s = spec.mfc[a];
            out << "\n[" << axis_name(a) << "]\n";
            out << "order = " << s.order << "\n";
            out << "alpha = " << format_real(s.alpha) << "\n";
            out << "kp = " << format_real(s.kp) << "\n";
            out << "kd = " << format_real(s.kd) << "\n";
            out << "window_seconds = " << format_real(s.window_seconds) << "\n";
            out << "sat = " << format_real(s.sat) << "\n";
            out << "output_scale = " << format_real(s.output_scale) << "\n";
        }
    } else {
        out << "controller = pid\n";
        out << "label = " << spec.label << "\n";
        out << "lambda = " << format_real(spec.pid.lambda) << "\n";
        out << "loop_hz = " << format_real(spec.pid.loop_hz) << "\n";
        for (Axis a : kAxes) {
            const PidAxisSettings& s = spec.pid[a];
            out << "\n[" << axis_name(a) << "]\n";
            out << "kp = " << format_real(s.gains.kp) << "\n";
            out << "ki = " << format_real(s.gains.ki) << "\n";
            out << "kd = " << format_real(s.gains.kd) << "\n";
            out << "integral_limit = " << format_real(s.gains.integral_limit) << "\n";
            out << "deriv_filter_tau = " << format_real(s.gains.deriv_filter_tau) << "\n";
            out << "sat = " << format_real(s.sat) << "\n";
        }
    }
    return out.str();
}

VehicleParams parse_vehicle_config(const ConfigDocument& doc) {
    const ConfigSection* sec = doc.find("vehicle");
    if (!sec) throw ConfigError(doc.source() + ": missing [vehicle] section");
    VehicleParams v;
    if (const ConfigEntry* p = sec->find("preset")) {
        try {
            v = vehicle_preset(p->value);
        } catch (const ConfigError& e) {
            doc.fail(*p, e.what());
        }
    }
    for_each_entry(doc, *sec, [&](const ConfigEntry& e) {
        if (e.key == "preset") return;
        if (e.key == "name") v.name = e.value;
        else if (e.key == "inertia") v.inertia = parse_vec3(e.value, e.key);
        else if (e.key == "arm_length") v.arm_length = parse_real(e.value, e.key);
        else if (e.key == "thrust_coeff") v.thrust_coeff = parse_real(e.value, e.key);
        else if (e.key == "torque_coeff") v.torque_coeff = parse_real(e.value, e.key);
        else if (e.key == "motor_tau") v.motor_tau = parse_real(e.value, e.key);
        else if (e.key == "yaw_drag") v.yaw_drag = parse_real(e.value, e.key);
        else if (e.key == "rate_cross_coupling") v.rate_cross_coupling = parse_bool(e.value, e.key);
        else throw ConfigError("unknown vehicle key");
    });
    try {
        v.validate();
    } catch (const ConfigError& e) {
        throw ConfigError(doc.source() + ": " + e.what());
    }
    return v;
}

std::string format_vehicle_config(const VehicleParams& v) {
    std::ostringstream out;
    out << "[vehicle]\n";
    out << "name = " << v.name << "\n";
    out << "inertia = " << format_list(v.inertia) << "        # kg m^2 (roll, pitch, yaw)\n";
    out << "arm_length = " << format_real(v.arm_length) << "        # m\n";
    out << "thrust_coeff = " << format_real(v.thrust_coeff) << "        # N per unit command\n";
    out << "torque_coeff = " << format_real(v.torque_coeff) << "        # N m per unit command\n";
    out << "motor_tau = " << format_real(v.motor_tau) << "        # s\n";
    out << "yaw_drag = " << format_real(v.yaw_drag) << "        # N m per deg/s\n";
    out << "rate_cross_coupling = " << (v.rate_cross_coupling ? "on" : "off") << "\n";
    return out.str();
}

FaultSpec parse_fault_config(const ConfigDocument& doc, const VehicleParams& vehicle) {
    const ConfigSection* sec = doc.find("faults");
    if (!sec) return FaultSpec{};
    FaultSpec f;
    if (const ConfigEntry* p = sec->find("preset")) {
        try {
            f = fault_preset(p->value, vehicle);
        } catch (const ConfigError& e) {
            doc.fail(*p, e.what());
        }
    }
    for_each_entry(doc, *sec, [&](const ConfigEntry& e) {
        if (e.key == "preset") return;
        if (e.key == "prop_effectiveness") f.prop_effectiveness = parse_vec4(e.value, e.key);
        else if (e.key == "imbalance_amp") f.imbalance_amp = parse_real(e.value, e.key);
        else if (e.key == "imbalance_freq") f.imbalance_freq = parse_real(e.value, e.key);
        else if (e.key == "onset_time") f.onset_time = parse_real(e.value, e.key);
        else if (e.key == "static_torque") f.static_torque = parse_vec3(e.value, e.key);
        else throw ConfigError("unknown fault key");
    });
    try {
        f.validate();
    } catch (const ConfigError& e) {
        throw ConfigError(doc.source() + ": " + e.what());
    }
    return f;
}

std::string format_fault_config(const FaultSpec& f) {
    std::ostringstream out;
    out << "[faults]\n";
    out << "prop_effectiveness = " << format_list(f.prop_effectiveness) << "\n";
    out << "imbalance_amp = " << format_real(f.imbalance_amp) << "        # N m\n";
    out << "imbalance_freq = " << format_real(f.imbalance_freq) << "        # Hz\n";
    out << "onset_time = " << format_real(f.onset_time) << "        # s\n";
    out << "static_torque = " << format_list(f.static_torque) << "        # N m\n";
    return out.str();
}

ControllerSpec controller_preset(std::string_view name) {
    ControllerSpec spec;
    if (name == "mfc-default" || name == "mfc") {
        spec.kind = ControllerKind::mfc;
        spec.label = "mfc";
        spec.mfc = MfcConfig::defaults();
        return spec;
    }
    if (name == "pid-tarot" || name == "pid") {
        // Output of `mfcsim tune-pid` on tarot-analog with the stuck-gear fault.
        spec.kind = ControllerKind::pid;
        spec.label = "pid";
        PidConfig rp{0.032, 0.04, 4e-4, 0.2, 0.01};
        spec.pid[Axis::roll].gains = rp;
        spec.pid[Axis::pitch].gains = rp;
        spec.pid[Axis::yaw].gains = PidConfig{0.04, 0.01, 0.0, 0.2, 0.01};
        return spec;
    }
    throw ConfigError("unknown controller preset '" + std::string(name) + "'");
}

std::vector<std::string> controller_preset_names() { return {"mfc-default", "pid-tarot"}; }

}  // namespace mfc
