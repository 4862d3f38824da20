#include "mfc/telemetry.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>

#include "mfc/config_file.hpp"
#include "mfc/errors.hpp"

namespace mfc {

namespace {

std::vector<std::string_view> split_commas(std::string_view line) {
    std::vector<std::string_view> out;
    while (true) {
        const auto c = line.find(',');
        out.push_back(line.substr(0, c));
        if (c == std::string_view::npos) break;
        line.remove_prefix(c + 1);
    }
    return out;
}

std::string_view strip_cr(std::string_view s) {
    if (!s.empty() && s.back() == '\r') s.remove_suffix(1);
    return s;
}

double parse_cell(std::string_view cell, std::string_view source, std::size_t line) {
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), v);
    if (ec != std::errc{} || ptr != cell.data() + cell.size() || cell.empty()) {
        throw ConfigError(std::string(source) + ":" + std::to_string(line) + ": bad number '" +
                          std::string(cell) + "'");
    }
    return v;
}

}  // namespace

std::array<double, 20> TelemetryRow::flatten() const {
    return {t,       ref[0],  ref[1],  ref[2],  rate[0],  rate[1],  rate[2],
            filt[0], filt[1], filt[2], fhat[0], fhat[1],  fhat[2],  u[0],
            u[1],    u[2],    motor[0], motor[1], motor[2], motor[3]};
}

TelemetryRow TelemetryRow::unflatten(const std::array<double, 20>& v) {
    TelemetryRow r;
    r.t = v[0];
    r.ref = {v[1], v[2], v[3]};
    r.rate = {v[4], v[5], v[6]};
    r.filt = {v[7], v[8], v[9]};
    r.fhat = {v[10], v[11], v[12]};
    r.u = {v[13], v[14], v[15]};
    r.motor = {v[16], v[17], v[18], v[19]};
    return r;
}

std::string telemetry_header() {
    std::string h;
    for (std::size_t i = 0; i < kTelemetryColumns.size(); ++i) {
        if (i) h += ',';
        h += kTelemetryColumns[i];
    }
    return h;
}

void write_telemetry_csv(std::ostream& out, std::span<const TelemetryRow> rows) {
    out << telemetry_header() << '\n';
    std::string line;
    for (const TelemetryRow& r : rows) {
        line.clear();
        const auto v = r.flatten();
        for (std::size_t i = 0; i < v.size(); ++i) {
            if (i) line += ',';
            line += format_real(v[i]);
        }
        line += '\n';
        out << line;
    }
}

void write_telemetry_csv(const std::filesystem::path& path, std::span<const TelemetryRow> rows) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ConfigError("cannot write telemetry file '" + path.string() + "'");
    write_telemetry_csv(out, rows);
    if (!out) throw ConfigError("failed writing telemetry file '" + path.string() + "'");
}

std::vector<TelemetryRow> read_telemetry_csv(std::istream& in) {
    std::string line;
    if (!std::getline(in, line) || strip_cr(line) != telemetry_header()) {
        throw ConfigError("telemetry CSV header mismatch");
    }
    std::vector<TelemetryRow> rows;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        const std::string_view l = strip_cr(line);
        if (l.empty()) continue;
        const auto cells = split_commas(l);
        if (cells.size() != kTelemetryColumns.size()) {
            throw ConfigError("telemetry line " + std::to_string(line_no) + ": expected 20 columns");
        }
        std::array<double, 20> v{};
        for (std::size_t i = 0; i < v.size(); ++i) v[i] = parse_cell(cells[i], "telemetry", line_no);
        rows.push_back(TelemetryRow::unflatten(v));
    }
    return rows;
}

std::vector<TelemetryRow> read_telemetry_csv(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot open telemetry file '" + path.string() + "'");
    return read_telemetry_csv(in);
}

int CsvTable::column(std::string_view name) const {
    for (std::size_t i = 0; i < header.size(); ++i) {
        if (header[i] == name) return static_cast<int>(i);
    }
    return -1;
}

CsvTable read_csv(std::istream& in, std::string_view source) {
    CsvTable table;
    std::string line;
    if (!std::getline(in, line)) throw ConfigError(std::string(source) + ": empty CSV");
    for (auto cell : split_commas(strip_cr(line))) {
        while (!cell.empty() && cell.front() == ' ') cell.remove_prefix(1);
        while (!cell.empty() && cell.back() == ' ') cell.remove_suffix(1);
        table.header.emplace_back(cell);
    }
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        const std::string_view l = strip_cr(line);
        if (l.empty()) continue;
        const auto cells = split_commas(l);
        if (cells.size() != table.header.size()) {
            throw ConfigError(std::string(source) + ":" + std::to_string(line_no) +
                              ": column count does not match header");
        }
        std::vector<double> row;
        row.reserve(cells.size());
        for (auto cell : cells) {
            while (!cell.empty() && cell.front() == ' ') cell.remove_prefix(1);
            row.push_back(parse_cell(cell, source, line_no));
        }
        table.rows.push_back(std::move(row));
    }
    return table;
}

Vec3 mean_abs_error(std::span<const TelemetryRow> rows) {
    Vec3 sum{};
    if (rows.empty()) return sum;
    for (const TelemetryRow& r : rows) {
        for (std::size_t i = 0; i < 3; ++i) sum[i] += std::abs(r.rate[i] - r.ref[i]);
    }
    for (double& s : sum) s /= static_cast<double>(rows.size());
    return sum;
}

}  // namespace mfc
