#pragma once

// Plain-text `key = value` files with `[section]` headers and `#` comments.

#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "mfc/attitude_controller.hpp"
#include "mfc/pid.hpp"
#include "mfc/quad_sim.hpp"

namespace mfc {

struct ConfigEntry {
    std::string key;
    std::string value;
    int line = 0;
};

struct ConfigSection {
    std::string name;  // "" for keys before the first header
    std::string argument;  // text after the name in "[scenario foo]"
    int line = 0;
    std::vector<ConfigEntry> entries;

    const ConfigEntry* find(std::string_view key) const;
};

class ConfigDocument {
public:
    /// Throws ConfigError with `source:line` on malformed lines or duplicate keys.
    static ConfigDocument parse(std::string_view text, std::string source = "<string>");
    static ConfigDocument load(const std::filesystem::path& path);

    const std::vector<ConfigSection>& sections() const { return sections_; }
    const ConfigSection& global() const { return sections_.front(); }
    const ConfigSection* find(std::string_view name) const;
    const std::string& source() const { return source_; }

    /// "source:line: message"
    [[noreturn]] void fail(const ConfigEntry& e, const std::string& message) const;

private:
    std::string source_;
    std::vector<ConfigSection> sections_;
};

double parse_real(std::string_view text, std::string_view what);
int parse_int(std::string_view text, std::string_view what);
bool parse_bool(std::string_view text, std::string_view what);
Vec3 parse_vec3(std::string_view text, std::string_view what);
std::array<double, 4> parse_vec4(std::string_view text, std::string_view what);

/// Shortest decimal text that reads back to the same double.
std::string format_real(double v);

enum class ControllerKind { mfc, pid };

/// A validated controller selection, either the MFC stack or the PID baseline.
struct ControllerSpec {
    ControllerKind kind = ControllerKind::mfc;
    std::string label = "mfc";
    MfcConfig mfc = MfcConfig::defaults();
    PidRateConfig pid{};

    std::unique_ptr<RateController> make() const;
    double dt() const { return kind == ControllerKind::mfc ? mfc.dt() : pid.dt(); }
    void validate() const;
};

/// `controller = mfc` (default) or `controller = pid` selects the schema.
ControllerSpec parse_controller_config(const ConfigDocument& doc);
ControllerSpec load_controller_config(const std::filesystem::path& path);
std::string format_controller_config(const ControllerSpec& spec);

/// [vehicle] section; `preset = name` seeds the defaults that other keys override.
VehicleParams parse_vehicle_config(const ConfigDocument& doc);
std::string format_vehicle_config(const VehicleParams& v);

/// [faults] section.
FaultSpec parse_fault_config(const ConfigDocument& doc, const VehicleParams& vehicle);
std::string format_fault_config(const FaultSpec& f);

/// Built-in controllers: "mfc-default" and "pid-tarot".
ControllerSpec controller_preset(std::string_view name);
std::vector<std::string> controller_preset_names();

}  // namespace mfc
