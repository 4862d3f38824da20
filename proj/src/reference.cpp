#include "mfc/reference.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>

#include "mfc/errors.hpp"
#include "mfc/telemetry.hpp"

namespace mfc {

namespace {

constexpr double kPi = std::numbers::pi;

struct Pulse {
    double t0, d, amp;
};

constexpr std::array<Pulse, 3> kAcroRoll{{{1.0, 1.6, 300.0}, {4.0, 1.6, -300.0}, {7.0, 1.2, 250.0}}};
constexpr std::array<Pulse, 3> kAcroPitch{{{1.8, 1.4, -200.0}, {5.0, 1.4, 200.0}, {7.6, 1.0, -150.0}}};
constexpr double kAcroYawAmp = 90.0;
constexpr double kAcroYawFreq = 0.25;

AxisReference operator+(AxisReference a, const AxisReference& b) {
    a.rate += b.rate;
    a.rate_dot += b.rate_dot;
    a.rate_ddot += b.rate_ddot;
    return a;
}

AxisReference doublet(double t, double amp) {
    const double tc = std::fmod(t, ReferenceProgram::kDoubletPeriod);
    const std::array<std::array<double, 3>, 3> segments{{{1.0, 0.0, amp}, {2.0, amp, -amp}, {3.0, -amp, 0.0}}};
    for (const auto& [t0, a, b] : segments) {
        if (tc >= t0 && tc < t0 + 1.0) return smooth_step(tc, t0, ReferenceProgram::kDoubletRamp, a, b);
    }
    return {};
}

AxisReference chirp(double t) {
    using P = ReferenceProgram;
    const double tc = std::fmod(t, P::kChirpSweep);
    const double k = (P::kChirpF1 - P::kChirpF0) / P::kChirpSweep;
    const double phase = 2.0 * kPi * (P::kChirpF0 * tc + 0.5 * k * tc * tc);
    const double w = 2.0 * kPi * (P::kChirpF0 + k * tc);
    const double w_dot = 2.0 * kPi * k;
    const double A = P::kChirpAmplitude;
    return {A * std::sin(phase), A * std::cos(phase) * w,
            -A * std::sin(phase) * w * w + A * std::cos(phase) * w_dot};
}

AxisReference acro(double t, Axis axis) {
    if (axis == Axis::yaw) {
        const double w = 2.0 * kPi * kAcroYawFreq;
        return {kAcroYawAmp * std::sin(w * t), kAcroYawAmp * w * std::cos(w * t),
                -kAcroYawAmp * w * w * std::sin(w * t)};
    }
    const double tc = std::fmod(t, ReferenceProgram::kAcroPeriod);
    const auto& pulses = axis == Axis::roll ? kAcroRoll : kAcroPitch;
    AxisReference r{};
    for (const Pulse& p : pulses) r = r + smooth_pulse(tc, p.t0, p.d, p.amp);
    return r;
}

std::string_view trim(std::string_view s) {
    while (!s.empty() && s.front() == ' ') s.remove_prefix(1);
    while (!s.empty() && s.back() == ' ') s.remove_suffix(1);
    return s;
}

}  // namespace

AxisReference smooth_step(double t, double t0, double d, double a, double b) {
    if (t <= t0) return {a, 0.0, 0.0};
    if (t >= t0 + d) return {b, 0.0, 0.0};
    const double x = kPi * (t - t0) / d;
    const double w = kPi / d;
    const double h = b - a;
    return {a + h * (1.0 - std::cos(x)) / 2.0, h * w * std::sin(x) / 2.0,
            h * w * w * std::cos(x) / 2.0};
}

AxisReference smooth_pulse(double t, double t0, double d, double amp) {
    if (t <= t0 || t >= t0 + d) return {};
    const double x = 2.0 * kPi * (t - t0) / d;
    const double w = 2.0 * kPi / d;
    return {amp * (1.0 - std::cos(x)) / 2.0, amp * w * std::sin(x) / 2.0,
            amp * w * w * std::cos(x) / 2.0};
}

ReferenceProgram ReferenceProgram::parse(std::string_view spec) {
    ReferenceProgram p;
    p.spec_ = std::string(spec);
    spec = trim(spec);

    if (spec.starts_with("replay=")) {
        const std::filesystem::path path(std::string(spec.substr(7)));
        std::ifstream in(path, std::ios::binary);
        if (!in) throw ConfigError("cannot open replay file '" + path.string() + "'");
        const CsvTable table = read_csv(in, path.string());
        const int tc = table.column("t");
        std::array<int, 3> cols{table.column("ref_roll"), table.column("ref_pitch"),
                                table.column("ref_yaw")};
        if (cols[0] < 0) cols = {table.column("roll"), table.column("pitch"), table.column("yaw")};
        if (tc < 0 || std::any_of(cols.begin(), cols.end(), [](int c) { return c < 0; })) {
            throw ConfigError(path.string() +
                              ": replay needs columns t and ref_roll,ref_pitch,ref_yaw (or roll,pitch,yaw)");
        }
        if (table.rows.empty()) throw ConfigError(path.string() + ": replay file has no samples");
        for (const auto& row : table.rows) {
            if (!p.replay_.t.empty() && row[tc] <= p.replay_.t.back()) {
                throw ConfigError(path.string() + ": replay time column must increase strictly");
            }
            p.replay_.t.push_back(row[tc]);
            p.replay_.rate.push_back({row[cols[0]], row[cols[1]], row[cols[2]]});
        }
        p.kind_ = Kind::replay;
        return p;
    }

    const auto colon = spec.find(':');
    const std::string_view name = trim(spec.substr(0, colon));
    if (name == "zero" || name == "hover") {
        p.kind_ = Kind::zero;
    } else if (name == "doublet") {
        p.kind_ = Kind::doublet;
        p.axes_ = {true, false, false};
    } else if (name == "chirp") {
        p.kind_ = Kind::chirp;
        p.axes_ = {true, false, false};
    } else if (name == "acro-script") {
        p.kind_ = Kind::acro;
    } else {
        throw ConfigError("unknown reference program '" + std::string(name) +
                          "' (expected zero, doublet, chirp, acro-script or replay=FILE)");
    }

    if (colon != std::string_view::npos) {
        p.axes_ = {false, false, false};
        std::string_view list = spec.substr(colon + 1);
        while (true) {
            const auto comma = list.find(',');
            const std::string_view item = trim(list.substr(0, comma));
            if (item == "roll") p.axes_[0] = true;
            else if (item == "pitch") p.axes_[1] = true;
            else if (item == "yaw") p.axes_[2] = true;
            else if (item == "all") p.axes_ = {true, true, true};
            else throw ConfigError("unknown axis '" + std::string(item) + "' in reference '" + p.spec_ + "'");
            if (comma == std::string_view::npos) break;
            list.remove_prefix(comma + 1);
        }
    }
    return p;
}

double ReferenceProgram::replay_rate(std::size_t axis, double t) const {
    const auto& ts = replay_.t;
    if (t <= ts.front()) return replay_.rate.front()[axis];
    if (t >= ts.back()) return replay_.rate.back()[axis];
    const auto hi = static_cast<std::size_t>(std::upper_bound(ts.begin(), ts.end(), t) - ts.begin());
    const std::size_t lo = hi - 1;
    const double f = (t - ts[lo]) / (ts[hi] - ts[lo]);
    return replay_.rate[lo][axis] + f * (replay_.rate[hi][axis] - replay_.rate[lo][axis]);
}

RateReference ReferenceProgram::at(double t) const {
    RateReference r;
    for (Axis a : kAxes) {
        const std::size_t i = index(a);
        if (!axes_[i]) continue;
        switch (kind_) {
            case Kind::zero: break;
            case Kind::doublet: r[a] = doublet(t, kDoubletAmplitude[i]); break;
            case Kind::chirp: r[a] = chirp(t); break;
            case Kind::acro: r[a] = acro(t, a); break;
            case Kind::replay: {
                // Differencing fallback at the default loop period.
                const double h = 1.0 / 250.0;
                const double y0 = replay_rate(i, t);
                const double y1 = replay_rate(i, t - h);
                const double y2 = replay_rate(i, t - 2.0 * h);
                r[a] = {y0, (y0 - y1) / h, (y0 - 2.0 * y1 + y2) / (h * h)};
                break;
            }
        }
    }
    return r;
}

std::vector<RateReference> ReferenceProgram::sample(double dt, std::size_t steps,
                                                    double rate_limit) const {
    if (!(dt > 0.0)) throw ConfigError("reference sampling needs dt > 0");
    std::vector<RateReference> out;
    out.reserve(steps);
    for (std::size_t k = 0; k < steps; ++k) {
        const double t = static_cast<double>(k) * dt;
        RateReference r;
        if (kind_ == Kind::replay) {
            for (Axis a : kAxes) {
                if (!axes_[index(a)]) continue;
                r[a].rate = replay_rate(index(a), t);
                if (k > 0) {
                    r[a].rate_dot = (r[a].rate - out[k - 1][a].rate) / dt;
                    r[a].rate_ddot = (r[a].rate_dot - out[k - 1][a].rate_dot) / dt;
                }
            }
        } else {
            r = at(t);
        }
        for (double v : r.rates()) {
            if (std::abs(v) > rate_limit) {
                throw ConfigError("reference '" + spec_ + "' exceeds the rate limit of " +
                                  std::to_string(rate_limit) + " deg/s");
            }
        }
        out.push_back(r);
    }
    return out;
}

}  // namespace mfc
