#include <cmath>
#include <random>

#include "doctest.h"
#include "mfc/errors.hpp"
#include "mfc/pid.hpp"

using namespace mfc;

TEST_SUITE("pid_step") {
    TEST_CASE("zero error gives zero output") {
        PidState s;
        const PidConfig c{1.0, 1.0, 1.0, 1.0, 0.01};
        for (int k = 0; k < 100; ++k) REQUIRE(pid_step(s, c, 0.0, 0.004) == 0.0);
    }

    TEST_CASE("pure proportional") {
        PidState s;
        CHECK(pid_step(s, PidConfig{1.0, 0.0, 0.0, 1.0, 0.01}, 5.0, 0.004) == 5.0);
    }

    TEST_CASE("one second of integration at 250 Hz") {
        PidState s;
        const PidConfig c{0.0, 1.0, 0.0, 10.0, 0.01};
        double u = 0.0;
        double oracle = 0.0;
        for (int k = 0; k < 250; ++k) {
            u = pid_step(s, c, 1.0, 0.004);
            oracle += 1.0 * 0.004;
        }
        CHECK(u == doctest::Approx(oracle).epsilon(1e-12));
        CHECK(u == doctest::Approx(1.0).epsilon(1e-12));
    }

    TEST_CASE("integral is clamped for any error stream") {
        std::mt19937_64 rng(12);
        std::normal_distribution<double> d(0.0, 200.0);
        const PidConfig c{0.0, 0.7, 0.0, 0.2, 0.01};
        PidState s;
        for (int k = 0; k < 5000; ++k) {
            const double u = pid_step(s, c, d(rng) + 50.0, 0.004);
            REQUIRE(std::abs(s.integral) <= c.integral_limit);
            REQUIRE(std::abs(u) <= c.ki * c.integral_limit + 1e-15);
        }
    }

    TEST_CASE("ki = kd = 0 is a pure gain") {
        std::mt19937_64 rng(13);
        std::normal_distribution<double> d(0.0, 30.0);
        const PidConfig c{0.37, 0.0, 0.0, 0.2, 0.01};
        PidState s;
        for (int k = 0; k < 1000; ++k) {
            const double e = d(rng);
            REQUIRE(pid_step(s, c, e, 0.004) == 0.37 * e);
        }
    }

    TEST_CASE("derivative is filtered and starts at zero") {
        const PidConfig c{0.0, 0.0, 1.0, 1.0, 0.01};
        PidState s;
        CHECK(pid_step(s, c, 10.0, 0.004) == 0.0);
        // Unit ramp in error: raw derivative 1/dt * step each sample.
        const double dt = 0.004, beta = dt / (0.01 + dt);
        double filt = 0.0;
        for (int k = 1; k < 50; ++k) {
            const double u = pid_step(s, c, 10.0 + k * 0.1, dt);
            filt += beta * (0.1 / dt - filt);
            REQUIRE(u == doctest::Approx(filt).epsilon(1e-12));
        }
        CHECK(s.deriv_filtered == doctest::Approx(0.1 / dt).epsilon(1e-3));
    }

    TEST_CASE("zero filter constant passes the raw difference") {
        const PidConfig c{0.0, 0.0, 1.0, 1.0, 0.0};
        PidState s;
        pid_step(s, c, 0.0, 0.01);
        CHECK(pid_step(s, c, 1.0, 0.01) == doctest::Approx(100.0));
    }

    TEST_CASE("bad inputs") {
        PidState s;
        const PidConfig c{1.0, 0.0, 0.0, 1.0, 0.01};
        CHECK_THROWS_AS(pid_step(s, c, std::nan(""), 0.004), NonFiniteError);
        CHECK_THROWS_AS(pid_step(s, c, 1.0, 0.0), ConfigError);
    }
}

TEST_SUITE("pid config") {
    TEST_CASE("validation") {
        CHECK_NOTHROW(PidConfig({1.0, 0.0, 0.0, 1.0, 0.01}).validate());
        CHECK_THROWS_AS(PidConfig({0.0, 0.0, 0.0, 1.0, 0.01}).validate(), ConfigError);
        CHECK_THROWS_AS(PidConfig({1.0, 0.0, 0.0, 0.0, 0.01}).validate(), ConfigError);
        CHECK_THROWS_AS(PidConfig({-1.0, 0.0, 0.0, 1.0, 0.01}).validate(), ConfigError);
        CHECK_THROWS_AS(PidConfig({1.0, 0.0, 0.0, 1.0, -0.01}).validate(), ConfigError);
    }

    TEST_CASE("PI rejects a derivative gain") {
        CHECK_THROWS_AS(PidConfig({1.0, 0.1, 0.01, 1.0, 0.01}).validate_pi(), ConfigError);
        PidRateConfig rc;
        for (Axis a : kAxes) rc[a].gains = PidConfig{0.01, 0.01, 0.0, 0.2, 0.01};
        CHECK_NOTHROW(rc.validate());
        rc[Axis::roll].gains.kd = 1e-3;
        CHECK_NOTHROW(rc.validate());
        rc[Axis::yaw].gains.kd = 1e-3;
        CHECK_THROWS_AS(RatePid{rc}, ConfigError);
    }
}

TEST_SUITE("RatePid") {
    PidRateConfig gains() {
        PidRateConfig rc;
        for (Axis a : kAxes) rc[a].gains = PidConfig{0.01, 0.02, 0.0, 0.2, 0.01};
        rc[Axis::roll].gains.kd = 1e-4;
        rc[Axis::pitch].gains.kd = 1e-4;
        return rc;
    }

    TEST_CASE("hover equilibrium") {
        RatePid p(gains());
        const auto out = p.step(RateReference{}, GyroReading{}, 0.5);
        CHECK(out.motors == MotorCommands{{0.5, 0.5, 0.5, 0.5}});
    }

    TEST_CASE("error sign and saturation") {
        RatePid p(gains());
        RateReference r;
        r[Axis::roll].rate = 1000.0;
        const auto out = p.step(r, GyroReading{}, 0.5);
        CHECK(out.axis_command[0] == 0.25);
        CHECK(out.axis_command[1] == 0.0);
        CHECK(out.motors[3] == doctest::Approx(0.75));
        CHECK(out.motors[1] == doctest::Approx(0.25));
    }

    TEST_CASE("fail-neutral") {
        RatePid p(gains());
        RatePid q(gains());
        p.step(RateReference{}, GyroReading{{1, 2, 3}, 0}, 0.5);
        q.step(RateReference{}, GyroReading{{1, 2, 3}, 0}, 0.5);
        GyroReading bad{{std::nan(""), 0, 0}, 1};
        const auto out = p.step(RateReference{}, bad, 0.3);
        CHECK(out.motors == MotorCommands{{0.3, 0.3, 0.3, 0.3}});
        CHECK(p.faulted());
        CHECK(p.step(RateReference{}, GyroReading{{4, 5, 6}, 2}, 0.5).motors ==
              q.step(RateReference{}, GyroReading{{4, 5, 6}, 2}, 0.5).motors);
    }
}
