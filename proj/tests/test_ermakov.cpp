#include "doctest.h"

#include <cmath>
#include <random>

#include "qpr/classical.hpp"
#include "support/rk_oracle.hpp"
#include "support/test_profiles.hpp"

using namespace qpr;
using qpr_test::constant_drive;
using qpr_test::log_slope;
using qpr_test::per_period_maxima;
using qpr_test::rk_ermakov;
using qpr_test::square_wave;

namespace {

std::vector<double> periods_grid(const DriveProfile& p, int samples_per_period) {
    std::vector<double> ts;
    const int n = p.n_periods() * samples_per_period;
    for (int i = 1; i <= n; ++i)
        ts.push_back(p.total_time() * i / static_cast<double>(n));
    return ts;
}

} // namespace

TEST_CASE("equilibrium width stays put") {
    SUBCASE("unit frequency") {
        const DriveProfile p = constant_drive(0.0, 0.0, 2.0, 10);
        const Trajectory traj =
            propagate_ermakov(p, {1.0, 0.0}, periods_grid(p, 8));
        for (const TrajectorySample& s : traj.samples) {
            CHECK(s.state.value == doctest::Approx(1.0).epsilon(1e-12));
            CHECK(std::abs(s.state.derivative) < 1e-12);
        }
    }
    SUBCASE("general constant frequency: rho = omega^{-1/2}") {
        const DriveProfile p = constant_drive(-0.5, 0.0, 2.0, 6, 1.3);
        const double wt = frequencies_at(p, 0.0).omega_tilde;
        const double rho0 = 1.0 / std::sqrt(wt);
        const Trajectory traj =
            propagate_ermakov(p, {rho0, 0.0}, periods_grid(p, 8));
        for (const TrajectorySample& s : traj.samples)
            CHECK(s.state.value == doctest::Approx(rho0).epsilon(1e-12));
    }
}

TEST_CASE("free-oscillator width breathes between fixed turning points") {
    const DriveProfile p = constant_drive(0.0, 0.0, 2.0 * M_PI, 10);
    const Trajectory traj =
        propagate_ermakov(p, {2.0, 0.0}, periods_grid(p, 64));
    double lo = 1e300, hi = 0.0;
    for (const TrajectorySample& s : traj.samples) {
        lo = std::min(lo, s.state.value);
        hi = std::max(hi, s.state.value);
    }
    // rho^2 = 4 cos^2 t + sin^2 t / 4 swings between 1/2 and 2
    CHECK(hi == doctest::Approx(2.0).epsilon(1e-9));
    CHECK(lo == doctest::Approx(0.5).epsilon(1e-9));
    CHECK(lo * hi == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("Pinney construction matches direct nonlinear integration") {
    struct Case {
        DriveProfile profile;
        OscState init;
    };
    const Case cases[] = {
        {constant_drive(0.0, 0.0, 2.0 * M_PI, 20), {2.0, 0.0}},       // conservative
        {square_wave(2.0, 0.3, 0.02, 20), {1.3, -0.2}},               // damped, in gap
        {square_wave(3.18, 0.3, 0.0, 20), {1.0 + 1e-3, 0.0}},         // in band
    };
    for (const Case& c : cases) {
        const std::vector<double> ts = periods_grid(c.profile, 4);
        const Trajectory pin = propagate_ermakov(c.profile, c.init, ts);
        const std::vector<OscState> rk = rk_ermakov(c.profile, c.init, ts, 1e-12);
        for (std::size_t i = 0; i < ts.size(); ++i) {
            CHECK(pin.samples[i].state.value ==
                  doctest::Approx(rk[i].value).epsilon(1e-8));
            const double dscale =
                std::abs(rk[i].derivative) + std::abs(rk[i].value);
            CHECK(std::abs(pin.samples[i].state.derivative - rk[i].derivative) <
                  1e-7 * dscale);
        }
    }
}

TEST_CASE("ermakov propagation restarts cleanly from a mid-state") {
    const DriveProfile p = square_wave(3.18, 0.3, 0.01, 12);
    const double t1 = 0.37 * p.total_time(), t2 = 0.83 * p.total_time();
    const OscState init{1.1, 0.05};
    const OscState direct = propagate_ermakov(p, init, {t2}).samples[0].state;
    const OscState mid = propagate_ermakov(p, init, {t1}).samples[0].state;
    const OscState two_leg = propagate_ermakov(p, mid, {t2}, t1).samples[0].state;
    CHECK(two_leg.value == doctest::Approx(direct.value).epsilon(1e-10));
    CHECK(two_leg.derivative ==
          doctest::Approx(direct.derivative).epsilon(1e-9));
}

TEST_CASE("rejects non-positive initial width") {
    const DriveProfile p = constant_drive(0.0, 0.0, 1.0, 1);
    CHECK_THROWS_AS(propagate_ermakov(p, {0.0, 0.0}, {0.5}), std::domain_error);
    CHECK_THROWS_AS(propagate_ermakov(p, {-1.0, 0.0}, {0.5}), std::domain_error);
}

TEST_CASE("in-band width maxima grow at the monodromy rate") {
    const double x = 3.18;
    const DriveProfile p = square_wave(x, 0.3, 0.0, 50);
    const double omega_cl = monodromy(square_wave(x, 0.3, 0.0, 1)).growth_exponent;
    const double wt0 = frequencies_at(p, 0.0).omega_tilde;

    const int spp = 32;
    const Trajectory traj = propagate_ermakov(
        p, {1.0 / std::sqrt(wt0) + 1e-6, 0.0}, periods_grid(p, spp));
    std::vector<double> times, maxima;
    per_period_maxima(traj, spp, times, maxima);
    times.erase(times.begin(), times.begin() + 20);
    maxima.erase(maxima.begin(), maxima.begin() + 20);
    CHECK(log_slope(times, maxima) == doctest::Approx(omega_cl).epsilon(0.01));
}

TEST_CASE("LR invariant is conserved and bounds the orbit") {
    // gentle band so the invariant's internal cancellation stays within
    // double precision over 100 periods
    const DriveProfile inband = square_wave(3.1426, 0.05, 0.001, 100);
    REQUIRE(in_band(monodromy(square_wave(3.1426, 0.05, 0.001, 1))));
    const DriveProfile gap = square_wave(2.0, 0.05, 0.001, 100);
    REQUIRE_FALSE(in_band(monodromy(square_wave(2.0, 0.05, 0.001, 1))));

    for (const DriveProfile& p : {inband, gap}) {
        const std::vector<double> ts = periods_grid(p, 8);
        const double wt0 = frequencies_at(p, 0.0).omega_tilde;
        const Trajectory q = propagate_linear(p, {1.0, 0.3}, ts);
        const Trajectory rho =
            propagate_ermakov(p, {1.0 / std::sqrt(wt0), 0.1}, ts);

        const TimePoint tp0{0.0, 1.0, wt0, wt0};
        const double i0 = lr_invariant({1.0, 0.3}, {1.0 / std::sqrt(wt0), 0.1}, tp0);
        REQUIRE(i0 > 0.0);
        double max_drift = 0.0;
        for (std::size_t i = 0; i < ts.size(); ++i) {
            const double ii = lr_invariant(q.samples[i].state,
                                           rho.samples[i].state,
                                           q.samples[i].at);
            max_drift = std::max(max_drift, std::abs(ii - i0) / i0);
            // rho bounds |q| through the invariant
            CHECK(rho.samples[i].state.value >=
                  std::abs(q.samples[i].state.value) / std::sqrt(2.0 * ii) *
                      (1.0 - 1e-12));
        }
        CHECK(max_drift <= 1e-9);
    }
}
