#pragma once

#include <array>
#include <complex>
#include <vector>

#include "qpr/drive_profile.hpp"

namespace qpr {

/// A (value, d/dt value) pair at one instant. Used for q, alpha and rho
/// trajectories; rho states must keep value > 0.
struct OscState {
    double value = 0.0;
    double derivative = 0.0;
};

enum class TrajectoryKind { linear_q, linear_alpha, ermakov_rho };

struct TrajectorySample {
    TimePoint at;
    OscState state;
};

/// Sampled time series of one auxiliary function, with the drive scalars
/// cached at every sample.
struct Trajectory {
    DriveProfile profile;
    TrajectoryKind kind = TrajectoryKind::linear_q;
    std::vector<TrajectorySample> samples;
};

/// 2x2 real matrix acting on (value, derivative) column states.
struct Mat2 {
    double a11 = 1.0, a12 = 0.0;
    double a21 = 0.0, a22 = 1.0;

    static Mat2 identity() { return {}; }

    Mat2 operator*(const Mat2& rhs) const {
        return {a11 * rhs.a11 + a12 * rhs.a21, a11 * rhs.a12 + a12 * rhs.a22,
                a21 * rhs.a11 + a22 * rhs.a21, a21 * rhs.a12 + a22 * rhs.a22};
    }

    OscState apply(const OscState& s) const {
        return {a11 * s.value + a12 * s.derivative,
                a21 * s.value + a22 * s.derivative};
    }

    double det() const { return a11 * a22 - a12 * a21; }
    double trace() const { return a11 + a22; }
};

/// Closed-form propagator of x'' + gamma x' + omega_tilde^2 x = 0 over a time
/// step dt with constant coefficients. Trigonometric when underdamped,
/// hyperbolic (in overflow-safe exponential form) when overdamped, polynomial
/// in the critically damped case |gamma - 2 omega_tilde| < 1e-12 * omega_tilde.
/// det equals exp(-gamma*dt) exactly in all three branches.
Mat2 segment_propagator(double gamma, double omega_tilde, double dt);

/// Segment-exact propagation of the damped linear equation (q or alpha).
/// `init` is the state at t_start; t_samples must be sorted, >= t_start and
/// within the simulated range.
Trajectory propagate_linear(const DriveProfile& profile, const OscState& init,
                            const std::vector<double>& t_samples,
                            TrajectoryKind kind = TrajectoryKind::linear_q,
                            double t_start = 0.0);

/// One-period transfer matrix of (q, q') together with its Floquet
/// multipliers and the amplitude growth rate per unit time,
/// growth_exponent = ln(max |multiplier|) / tau.
struct MonodromyResult {
    Mat2 matrix;
    std::array<std::complex<double>, 2> multipliers;
    double growth_exponent = 0.0;
    double ln_max_multiplier = 0.0; // growth_exponent * tau, dimensionless
};

MonodromyResult monodromy(const DriveProfile& profile);

/// Parametric resonance iff max |multiplier| > 1, with a 1e-12 margin so the
/// exactly-marginal conservative gaps (|multiplier| = 1 up to rounding) do not
/// flicker.
bool in_band(const MonodromyResult& m);

struct BandScanPoint {
    double omega0_tau = 0.0;
    double growth_exponent = 0.0;
    bool in_band = false;
};

/// A maximal omega0*tau interval with positive growth, edges refined by
/// bisection between the bracketing grid points.
struct BandInterval {
    double lower = 0.0;
    double upper = 0.0;
};

struct BandScan {
    std::vector<BandScanPoint> points;
    std::vector<BandInterval> bands;
};

/// Grid evaluation of the monodromy growth exponent over omega0*tau in
/// [x_min, x_max] (n_points >= 2), sweeping by period rescaling
/// (see scaled_to_omega0_tau). Grid points are independent; `threads` > 1
/// splits them across workers.
BandScan scan_bands(const DriveProfile& shape, double x_min, double x_max,
                    int n_points, int threads = 1);

/// E = (x'^2 + omega_tilde^2 x^2) / 2.
double classical_energy(const OscState& state, const TimePoint& tp);

/// H = beta^2 (p^2 + omega^2 q^2) / 2 with p = q'/beta. Numerically equal to
/// classical_energy when expanded.
double hamiltonian_energy(const OscState& state, const TimePoint& tp);

/// Lewis-Riesenfeld invariant I = [(q/rho)^2 + (p rho - rho' q / beta)^2] / 2.
/// Constant along paired solutions of the linear and the nonlinear auxiliary
/// equations. Throws std::domain_error for rho <= 0.
double lr_invariant(const OscState& q_state, const OscState& rho_state,
                    const TimePoint& tp);

/// Nonlinear auxiliary function rho(t) obeying
///   rho'' + gamma rho' + omega_tilde^2 rho = beta^2 / rho^3,
/// built by the Pinney superposition of two linear solutions u, v:
/// rho = sqrt(u^2 + v^2/W^2) with W the (constant) Wronskian of (u, v) in the
/// beta-rescaled time frame. Segment-exact, positive for all t.
/// init.value must be > 0 (std::domain_error otherwise); init.derivative is
/// d rho / dt at t_start.
Trajectory propagate_ermakov(const DriveProfile& profile, const OscState& init,
                             const std::vector<double>& t_samples,
                             double t_start = 0.0);

} // namespace qpr
