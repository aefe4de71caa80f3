#pragma once

#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

#include "qpr/classical.hpp"
#include "qpr/drive_profile.hpp"

// Direct adaptive Runge-Kutta (Cash-Karp 4/5) integration of the nonlinear
// width equation rho'' + gamma rho' + omega_tilde^2 rho = beta^2/rho^3,
// segment by segment. This is the independent oracle the Pinney construction
// is checked against; it shares no propagation code with the library.

namespace qpr_test {

namespace ck {
constexpr double b21 = 1.0 / 5.0;
constexpr double b31 = 3.0 / 40.0, b32 = 9.0 / 40.0;
constexpr double b41 = 3.0 / 10.0, b42 = -9.0 / 10.0, b43 = 6.0 / 5.0;
constexpr double b51 = -11.0 / 54.0, b52 = 5.0 / 2.0, b53 = -70.0 / 27.0,
                 b54 = 35.0 / 27.0;
constexpr double b61 = 1631.0 / 55296.0, b62 = 175.0 / 512.0,
                 b63 = 575.0 / 13824.0, b64 = 44275.0 / 110592.0,
                 b65 = 253.0 / 4096.0;
constexpr double c1 = 37.0 / 378.0, c3 = 250.0 / 621.0, c4 = 125.0 / 594.0,
                 c6 = 512.0 / 1771.0;
constexpr double d1 = c1 - 2825.0 / 27648.0, d3 = c3 - 18575.0 / 48384.0,
                 d4 = c4 - 13525.0 / 55296.0, d5 = -277.0 / 14336.0,
                 d6 = c6 - 1.0 / 4.0;
} // namespace ck

struct Rk2State {
    double rho;
    double drho;
};

// One adaptive integration across [t0, t1] with constant gamma, omega_tilde
// and beta(t) = beta0 * exp(-gamma (t - t0)).
inline Rk2State rk_segment(Rk2State y, double t0, double t1, double gamma,
                           double omega_tilde, double beta0, double tol) {
    const double wt2 = omega_tilde * omega_tilde;
    auto rhs = [&](double t, const Rk2State& s, double& f0, double& f1) {
        const double beta = beta0 * std::exp(-gamma * (t - t0));
        f0 = s.drho;
        f1 = -gamma * s.drho - wt2 * s.rho +
             beta * beta / (s.rho * s.rho * s.rho);
    };

    double t = t0;
    double h = (t1 - t0) / 64.0;
    int steps = 0;
    while (t < t1) {
        if (++steps > 2000000) throw std::runtime_error("rk oracle stalled");
        if (t + h > t1) h = t1 - t;
        double k10, k11, k20, k21, k30, k31, k40, k41, k50, k51, k60, k61;
        rhs(t, y, k10, k11);
        rhs(t + h / 5.0, {y.rho + h * ck::b21 * k10, y.drho + h * ck::b21 * k11},
            k20, k21);
        rhs(t + 3.0 * h / 10.0,
            {y.rho + h * (ck::b31 * k10 + ck::b32 * k20),
             y.drho + h * (ck::b31 * k11 + ck::b32 * k21)},
            k30, k31);
        rhs(t + 3.0 * h / 5.0,
            {y.rho + h * (ck::b41 * k10 + ck::b42 * k20 + ck::b43 * k30),
             y.drho + h * (ck::b41 * k11 + ck::b42 * k21 + ck::b43 * k31)},
            k40, k41);
        rhs(t + h,
            {y.rho + h * (ck::b51 * k10 + ck::b52 * k20 + ck::b53 * k30 +
                          ck::b54 * k40),
             y.drho + h * (ck::b51 * k11 + ck::b52 * k21 + ck::b53 * k31 +
                           ck::b54 * k41)},
            k50, k51);
        rhs(t + 7.0 * h / 8.0,
            {y.rho + h * (ck::b61 * k10 + ck::b62 * k20 + ck::b63 * k30 +
                          ck::b64 * k40 + ck::b65 * k50),
             y.drho + h * (ck::b61 * k11 + ck::b62 * k21 + ck::b63 * k31 +
                           ck::b64 * k41 + ck::b65 * k51)},
            k60, k61);

        const double y0 = y.rho + h * (ck::c1 * k10 + ck::c3 * k30 +
                                       ck::c4 * k40 + ck::c6 * k60);
        const double y1 = y.drho + h * (ck::c1 * k11 + ck::c3 * k31 +
                                        ck::c4 * k41 + ck::c6 * k61);
        const double e0 = h * (ck::d1 * k10 + ck::d3 * k30 + ck::d4 * k40 +
                               ck::d5 * k50 + ck::d6 * k60);
        const double e1 = h * (ck::d1 * k11 + ck::d3 * k31 + ck::d4 * k41 +
                               ck::d5 * k51 + ck::d6 * k61);
        const double scale0 = tol * (std::abs(y.rho) + std::abs(h * k10) + 1e-30);
        const double scale1 = tol * (std::abs(y.drho) + std::abs(h * k11) + 1e-30);
        const double err = std::max(std::abs(e0) / scale0, std::abs(e1) / scale1);
        if (!(y0 > 0.0)) { // stepped through the repulsive barrier; retry
            h *= 0.5;
            continue;
        }
        if (err <= 1.0) {
            t += h;
            y = {y0, y1};
            const double grow = err > 0.0 ? 0.9 * std::pow(err, -0.2) : 5.0;
            h *= std::min(5.0, std::max(0.2, grow));
        } else {
            h *= std::max(0.2, 0.9 * std::pow(err, -0.25));
        }
    }
    return y;
}

// rho(t) at the requested times, by direct RK through the piecewise drive.
inline std::vector<qpr::OscState> rk_ermakov(const qpr::DriveProfile& p,
                                             qpr::OscState init,
                                             const std::vector<double>& times,
                                             double tol = 1e-12) {
    std::vector<qpr::OscState> out;
    Rk2State y{init.value, init.derivative};
    double cur = 0.0;
    double exposure = 0.0;
    const double tau = p.tau();
    const auto& cum = p.boundaries();
    for (double target : times) {
        while (cur < target) {
            double k = std::floor(cur / tau);
            double local = cur - k * tau;
            if (local >= tau) { k += 1.0; local -= tau; }
            const std::size_t idx = p.segment_index(local);
            const double piece_end =
                std::min(target, k * tau + cum[idx + 1]);
            if (!(piece_end > cur)) { // ulp collision at a boundary
                cur = std::nextafter(cur, std::numeric_limits<double>::infinity());
                continue;
            }
            const qpr::Segment& seg = p.segments()[idx];
            const double beta0 = std::exp(-exposure);
            y = rk_segment(y, cur, piece_end, seg.gamma,
                           p.segment_omega_tilde(idx), beta0, tol);
            exposure += seg.gamma * (piece_end - cur);
            cur = piece_end;
        }
        out.push_back({y.rho, y.drho});
    }
    return out;
}

} // namespace qpr_test
