#include <cmath>
#include <limits>
#include <random>
#include <vector>

#include "doctest.h"
#include "mfc/errors.hpp"
#include "mfc/ultra_local.hpp"

using namespace mfc;

namespace {

UltraLocalConfig roll_row() {
    UltraLocalConfig c;
    c.order = 2;
    c.alpha = 1.0;
    c.kp = 3.0;
    c.kd = 0.096;
    c.sample_period = 0.004;
    c.window_len = 5;
    return c;
}

UltraLocalConfig yaw_row() {
    UltraLocalConfig c;
    c.order = 1;
    c.alpha = 1.0;
    c.kp = 2.7;
    c.kd = 0.0;
    return c;
}

// Plain mean over the last `n` values, written without the ring buffer.
double oracle_mean(const std::vector<double>& samples, int n) {
    if (samples.empty()) return 0.0;
    const std::size_t count = std::min<std::size_t>(samples.size(), static_cast<std::size_t>(n));
    double s = 0.0;
    for (std::size_t i = samples.size() - count; i < samples.size(); ++i) s += samples[i];
    return s / static_cast<double>(count);
}

}  // namespace

TEST_SUITE("ultra_local config") {
    TEST_CASE("default rows validate") {
        CHECK_NOTHROW(roll_row().validate());
        CHECK_NOTHROW(yaw_row().validate());
    }

    TEST_CASE("invalid parameters are rejected") {
        auto c = roll_row();
        c.alpha = 0.0;
        CHECK_THROWS_AS(c.validate(), ConfigError);
        c = roll_row();
        c.sample_period = 0.0;
        CHECK_THROWS_AS(c.validate(), ConfigError);
        c = roll_row();
        c.window_len = 0;
        CHECK_THROWS_AS(c.validate(), ConfigError);
        c = roll_row();
        c.order = 3;
        CHECK_THROWS_AS(c.validate(), ConfigError);
        c = roll_row();
        c.kp = -1.0;
        CHECK_THROWS_AS(c.validate(), ConfigError);
    }

    TEST_CASE("iP with a derivative gain is rejected") {
        auto c = yaw_row();
        c.kd = 0.1;
        CHECK_THROWS_AS(c.validate(), ConfigError);
    }
}

TEST_SUITE("estimate_f") {
    TEST_CASE("empty state with zero input gives zero") {
        AxisControllerState s(5);
        CHECK(s.f_hat() == 0.0);
        CHECK(s.filled() == 0);
        CHECK(estimate_f(s, roll_row(), 0.0, 0.0) == 0.0);
    }

    TEST_CASE("constant stream recovers F exactly") {
        AxisControllerState s(5);
        const auto c = roll_row();
        double f = 0.0;
        for (int k = 0; k < 7; ++k) f = estimate_f(s, c, 3.0, 1.0);
        CHECK(f == 2.0);
        CHECK(s.filled() == 5);
    }

    TEST_CASE("partial window mean matches brute force") {
        AxisControllerState s(5);
        const auto c = roll_row();
        std::vector<double> seen;
        const double pattern[] = {1.0, 3.0, 1.0, 3.0};
        double f = 0.0;
        for (double v : pattern) {
            f = estimate_f(s, c, v, 0.0);
            seen.push_back(v);
            CHECK(f == doctest::Approx(oracle_mean(seen, 5)).epsilon(1e-15));
        }
        CHECK(f == 2.0);
        CHECK(s.filled() == 4);
    }

    TEST_CASE("sliding window evicts the oldest sample") {
        std::mt19937_64 rng(7);
        std::uniform_real_distribution<double> d(-50.0, 50.0);
        for (int n : {1, 3, 5, 17}) {
            UltraLocalConfig c = roll_row();
            c.window_len = n;
            AxisControllerState s(n);
            std::vector<double> seen;
            for (int k = 0; k < 100; ++k) {
                const double y = d(rng), u = d(rng);
                const double f = estimate_f(s, c, y, u);
                seen.push_back(y - c.alpha * u);
                REQUIRE(f == doctest::Approx(oracle_mean(seen, n)).epsilon(1e-12));
                REQUIRE(s.filled() <= n);
            }
        }
    }

    TEST_CASE("exact for constant F across alpha and window length") {
        std::mt19937_64 rng(11);
        std::uniform_real_distribution<double> alpha_d(-10.0, 10.0);
        std::uniform_real_distribution<double> u_d(-2.0, 2.0);
        for (int n = 1; n <= 64; ++n) {
            double alpha = alpha_d(rng);
            if (std::abs(alpha) < 1e-3) alpha = 1.0;
            const double F = 4.25;
            UltraLocalConfig c = roll_row();
            c.alpha = alpha;
            c.window_len = n;
            AxisControllerState s(n);
            double f = 0.0;
            for (int k = 0; k < n; ++k) {
                const double u = u_d(rng);
                f = estimate_f(s, c, F + alpha * u, u);
            }
            REQUIRE(std::abs(f - F) <= 1e-12 * std::abs(F));
        }
    }

    TEST_CASE("linear in the sample stream") {
        std::mt19937_64 rng(3);
        std::normal_distribution<double> d(0.0, 5.0);
        UltraLocalConfig c = roll_row();
        c.alpha = 2.5;
        c.window_len = 9;
        AxisControllerState a(9), b(9), sum(9);
        for (int k = 0; k < 40; ++k) {
            const double y1 = d(rng), u1 = d(rng), y2 = d(rng), u2 = d(rng);
            const double fa = estimate_f(a, c, y1, u1);
            const double fb = estimate_f(b, c, y2, u2);
            const double fs = estimate_f(sum, c, y1 + y2, u1 + u2);
            REQUIRE(fs == doctest::Approx(fa + fb).epsilon(1e-12).scale(10.0));
        }
    }

    TEST_CASE("non-finite input is rejected without touching the state") {
        AxisControllerState s(5);
        const auto c = roll_row();
        estimate_f(s, c, 1.0, 0.0);
        CHECK_THROWS_AS(estimate_f(s, c, std::nan(""), 0.0), NonFiniteError);
        CHECK_THROWS_AS(estimate_f(s, c, 1.0, std::numeric_limits<double>::infinity()),
                        NonFiniteError);
        CHECK(s.filled() == 1);
        CHECK(s.f_hat() == 1.0);
    }

    TEST_CASE("window size must match the config") {
        AxisControllerState s(4);
        CHECK_THROWS_AS(estimate_f(s, roll_row(), 1.0, 0.0), ConfigError);
    }
}

TEST_SUITE("backward_difference") {
    TEST_CASE("direct examples") {
        CHECK(backward_difference(100.0, 100.0, 0.02) == 0.0);
        CHECK(backward_difference(102.0, 100.0, 0.02) == doctest::Approx(100.0).epsilon(1e-12));
    }

    TEST_CASE("non-positive period is a configuration error") {
        CHECK_THROWS_AS(backward_difference(1.0, 0.0, 0.0), ConfigError);
        CHECK_THROWS_AS(backward_difference(1.0, 0.0, -0.004), ConfigError);
    }

    TEST_CASE("sin sampled at 250 Hz differentiates to cos within T/2") {
        const double T = 0.004;
        double worst = 0.0;
        for (int k = 1; k < 2000; ++k) {
            const double t = k * T;
            const double d = backward_difference(std::sin(t), std::sin(t - T), T);
            worst = std::max(worst, std::abs(d - std::cos(t)));
        }
        // Taylor remainder: |f''| <= 1, so the error is at most T/2.
        CHECK(worst <= T / 2.0 + 1e-9);
        CHECK(worst > 0.0);
    }

    TEST_CASE("affine rate signals are differentiated exactly") {
        std::mt19937_64 rng(5);
        std::uniform_real_distribution<double> d(-100.0, 100.0);
        for (int i = 0; i < 200; ++i) {
            const double a = d(rng), b = d(rng), t = std::abs(d(rng)), T = 0.004;
            const double got = backward_difference(a + b * t, a + b * (t - T), T);
            REQUIRE(got == doctest::Approx(b).epsilon(1e-9).scale(100.0));
        }
    }
}

TEST_SUITE("control laws") {
    TEST_CASE("iPD on trajectory with no disturbance is zero") {
        CHECK(ipd_step(ControlStepInput{}, 0.0, roll_row()) == 0.0);
    }

    TEST_CASE("iPD cancels the disturbance estimate") {
        CHECK(ipd_step(ControlStepInput{}, 2.0, roll_row()) == -2.0);
    }

    TEST_CASE("iP examples") {
        CHECK(ip_step(ControlStepInput{}, 0.0, yaw_row()) == 0.0);
        ControlStepInput in;
        in.y = 10.0;
        CHECK(ip_step(in, 0.0, yaw_row()) == doctest::Approx(-27.0).epsilon(1e-15));
    }

    TEST_CASE("order mismatch throws") {
        CHECK_THROWS_AS(ipd_step(ControlStepInput{}, 0.0, yaw_row()), ConfigError);
        CHECK_THROWS_AS(ip_step(ControlStepInput{}, 0.0, roll_row()), ConfigError);
    }

    TEST_CASE("non-finite inputs throw") {
        ControlStepInput in;
        in.y_ref_ddot = std::nan("");
        CHECK_THROWS_AS(ipd_step(in, 0.0, roll_row()), NonFiniteError);
        CHECK_THROWS_AS(ipd_step(ControlStepInput{}, std::nan(""), roll_row()), NonFiniteError);
        in = {};
        in.y_ref_dot = std::numeric_limits<double>::infinity();
        CHECK_THROWS_AS(ip_step(in, 0.0, yaw_row()), NonFiniteError);
    }

    TEST_CASE("substituting iPD into the plant gives the error equation") {
        std::mt19937_64 rng(2024);
        std::uniform_real_distribution<double> d(-100.0, 100.0);
        std::uniform_real_distribution<double> pos(0.01, 20.0);
        for (int i = 0; i < 20; ++i) {
            UltraLocalConfig c = roll_row();
            c.alpha = d(rng);
            c.kp = pos(rng);
            c.kd = pos(rng);
            ControlStepInput in{d(rng), d(rng), d(rng), d(rng), d(rng), 0.0};
            const double F = d(rng), f_hat = d(rng);
            const double u = ipd_step(in, f_hat, c);
            const double y_ddot = F + c.alpha * u;
            const double e = in.y - in.y_ref, e_dot = in.y_dot - in.y_ref_dot;
            const double e_ddot = y_ddot - in.y_ref_ddot;
            const double lhs = e_ddot + c.kd * e_dot + c.kp * e;
            const double scale = std::abs(F) + std::abs(f_hat) + std::abs(in.y_ref_ddot) +
                                 c.kp * std::abs(e) + c.kd * std::abs(e_dot);
            REQUIRE(std::abs(lhs - (F - f_hat)) <= 1e-13 * scale);
        }
    }

    TEST_CASE("iP on a first-order plant decays at rate kp") {
        // ydot = F + u, F = 5, exact F-hat, e(t) = e0 exp(-kp t).
        const auto c = yaw_row();
        const double F = 5.0, dt = 1e-4, e0 = 10.0;
        double y = e0;
        double worst = 0.0;
        for (int k = 0; k <= 20000; ++k) {
            const double t = k * dt;
            worst = std::max(worst, std::abs(y - e0 * std::exp(-c.kp * t)));
            ControlStepInput in;
            in.y = y;
            const double u = ip_step(in, F, c);
            y += dt * (F + c.alpha * u);
        }
        // Forward Euler global error is O(dt): bound kp^2 e0 t e^{-kp t} dt / 2 <= 1.5e-3.
        CHECK(worst < 2e-3);
    }
}

namespace {

struct DoubleIntegratorRun {
    std::vector<double> e;
    std::vector<double> forcing;  // F - F-hat seen by the plant
    std::vector<double> u;
};

// y'' = F + b u under iPD with the sliding-window estimate, semi-implicit Euler.
DoubleIntegratorRun run_double_integrator(UltraLocalConfig c, double b, double F, double seconds) {
    const double dt = c.sample_period;
    AxisControllerState s(c.window_len);
    double y = 0.0, v = 0.0, u_prev = 0.0, v_prev = 0.0;
    bool primed = false;
    DoubleIntegratorRun out;
    const int n = static_cast<int>(std::lround(seconds / dt));
    for (int k = 0; k < n; ++k) {
        const double acc = primed ? backward_difference(v, v_prev, dt) : 0.0;
        v_prev = v;
        primed = true;
        const double f_hat = estimate_f(s, c, acc, u_prev);
        ControlStepInput in{y, v, 0.0, 0.0, 0.0, u_prev};
        const double u = ipd_step(in, f_hat, c);
        out.e.push_back(y);
        out.forcing.push_back(F - f_hat);
        out.u.push_back(u);
        v += dt * (F + b * u);
        y += dt * v;
        u_prev = u;
    }
    return out;
}

}  // namespace

TEST_SUITE("closed loop") {
    TEST_CASE("double integrator with constant disturbance holds |e| < 0.01") {
        const auto c = roll_row();
        const auto run = run_double_integrator(c, c.alpha, 1.0, 10.0);
        double worst = 0.0;
        for (double e : run.e) worst = std::max(worst, std::abs(e));
        CHECK(worst < 0.01);

        // Independent oracle: integrate e'' + kd e' + kp e = F - F_hat with the
        // same step and the recorded forcing.
        double e = 0.0, ed = 0.0, diff = 0.0;
        for (std::size_t k = 0; k < run.e.size(); ++k) {
            diff = std::max(diff, std::abs(e - run.e[k]));
            const double edd = run.forcing[k] - c.kd * ed - c.kp * e;
            ed += c.sample_period * edd;
            e += c.sample_period * ed;
        }
        CHECK(diff < 1e-12);
    }

    TEST_CASE("error trajectory is invariant when alpha and plant gain scale together") {
        auto c = roll_row();
        const auto base = run_double_integrator(c, c.alpha, 1.0, 10.0);
        for (double scale : {0.5, 2.0, 10.0}) {
            UltraLocalConfig cs = c;
            cs.alpha = c.alpha * scale;
            const auto run = run_double_integrator(cs, cs.alpha, 1.0, 10.0);
            REQUIRE(run.e.size() == base.e.size());
            for (std::size_t k = 0; k < base.e.size(); ++k) {
                REQUIRE(run.e[k] == doctest::Approx(base.e[k]).epsilon(1e-9).scale(1e-6));
                REQUIRE(run.u[k] * scale == doctest::Approx(base.u[k]).epsilon(1e-9).scale(1e-6));
            }
        }
    }
}

TEST_SUITE("saturate") {
    TEST_CASE("examples") {
        CHECK(saturate(0.2, -0.3, 0.3) == 0.2);
        CHECK(saturate(0.9, -0.3, 0.3) == 0.3);
        CHECK(saturate(-0.9, -0.3, 0.3) == -0.3);
        CHECK_THROWS_AS(saturate(0.0, 0.3, 0.3), ConfigError);
        CHECK_THROWS_AS(saturate(0.0, 0.4, 0.3), ConfigError);
    }

    TEST_CASE("idempotent and monotone") {
        std::mt19937_64 rng(9);
        std::uniform_real_distribution<double> d(-2.0, 2.0);
        for (int i = 0; i < 1000; ++i) {
            const double a = d(rng), b = d(rng);
            const double sa = saturate(a, -0.25, 0.25);
            REQUIRE(saturate(sa, -0.25, 0.25) == sa);
            if (a <= b) REQUIRE(sa <= saturate(b, -0.25, 0.25));
        }
    }
}
