#pragma once

#include <array>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "mfc/types.hpp"

namespace mfc {

inline constexpr std::array<std::string_view, 20> kTelemetryColumns{
    "t",          "ref_roll",   "ref_pitch",  "ref_yaw",    "rate_roll",
    "rate_pitch", "rate_yaw",   "filt_roll",  "filt_pitch", "filt_yaw",
    "fhat_roll",  "fhat_pitch", "fhat_yaw",   "u_roll",     "u_pitch",
    "u_yaw",      "m1",         "m2",         "m3",         "m4",
};

struct TelemetryRow {
    double t = 0.0;
    Vec3 ref{};
    Vec3 rate{};  // gyro as measured
    Vec3 filt{};
    Vec3 fhat{};
    Vec3 u{};
    std::array<double, 4> motor{};

    std::array<double, 20> flatten() const;
    static TelemetryRow unflatten(const std::array<double, 20>& v);
    bool operator==(const TelemetryRow&) const = default;
};

std::string telemetry_header();

/// Header line plus one line per row, shortest round-trip number formatting.
void write_telemetry_csv(std::ostream& out, std::span<const TelemetryRow> rows);
void write_telemetry_csv(const std::filesystem::path& path, std::span<const TelemetryRow> rows);

/// Requires the exact telemetry header; throws ConfigError otherwise.
std::vector<TelemetryRow> read_telemetry_csv(std::istream& in);
std::vector<TelemetryRow> read_telemetry_csv(const std::filesystem::path& path);

struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<double>> rows;

    /// Column position, or -1.
    int column(std::string_view name) const;
};

/// Numeric CSV with a header line.
CsvTable read_csv(std::istream& in, std::string_view source = "<stream>");

/// Mean over rows of |rate - ref| per axis.
Vec3 mean_abs_error(std::span<const TelemetryRow> rows);

}  // namespace mfc
