#include "qpr/classical.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include "parallel.hpp"

namespace qpr {

namespace {

// Walks the piecewise-constant pieces covering (t0, t1] and calls
// step(gamma, omega_tilde, dt) for each. Boundary rounding may produce an
// ulp-sized extra piece, which is harmless (the propagator is ~identity).
template <class Step>
void walk_pieces(const DriveProfile& p, double t0, double t1, Step&& step) {
    const double tau = p.tau();
    const auto& cum = p.boundaries();
    double cur = t0;
    while (cur < t1) {
        double k = std::floor(cur / tau);
        double local = cur - k * tau;
        if (local >= tau) { k += 1.0; local -= tau; }
        if (local < 0.0) local = 0.0;
        const std::size_t idx = p.segment_index(local);
        double piece_end = std::min(t1, k * tau + cum[idx + 1]);
        if (!(piece_end > cur)) // ulp collision at a boundary: creep past it
            piece_end = std::min(
                t1, std::nextafter(cur, std::numeric_limits<double>::infinity()));
        const Segment& seg = p.segments()[idx];
        step(seg.gamma, p.segment_omega_tilde(idx), piece_end - cur);
        cur = piece_end;
    }
}

void check_samples(const DriveProfile& p, const std::vector<double>& ts,
                   double t_start) {
    if (!(t_start >= 0.0) || t_start > p.total_time())
        throw std::domain_error("t_start outside simulated range");
    double prev = t_start;
    for (double t : ts) {
        if (t < prev)
            throw std::domain_error("t_samples must be sorted and >= t_start");
        prev = t;
    }
    if (!ts.empty() &&
        ts.back() > p.total_time() * (1.0 + 16.0 * 1e-16))
        throw std::domain_error("t_samples exceed the simulated range");
}

} // namespace

Mat2 segment_propagator(double gamma, double omega_tilde, double dt) {
    if (dt == 0.0) return Mat2::identity();
    const double half = 0.5 * gamma;
    const double wt2 = omega_tilde * omega_tilde;
    if (std::abs(gamma - 2.0 * omega_tilde) < 1e-12 * omega_tilde) {
        // critically damped, measure-zero in the drive space
        const double e = std::exp(-half * dt);
        return {e * (1.0 + half * dt), e * dt,
                -e * wt2 * dt, e * (1.0 - half * dt)};
    }
    const double disc = wt2 - half * half;
    if (disc > 0.0) {
        const double wd = std::sqrt(disc);
        const double c = std::cos(wd * dt);
        const double s = std::sin(wd * dt) / wd;
        const double e = std::exp(-half * dt);
        return {e * (c + half * s), e * s,
                -e * wt2 * s, e * (c - half * s)};
    }
    // overdamped: both exponents are <= 0, so nothing can overflow
    const double kp = std::sqrt(-disc);
    const double ep = std::exp((kp - half) * dt);
    const double em = std::exp(-(kp + half) * dt);
    const double ch = 0.5 * (ep + em);
    const double sh = 0.5 * (ep - em) / kp;
    return {ch + half * sh, sh,
            -wt2 * sh, ch - half * sh};
}

Trajectory propagate_linear(const DriveProfile& profile, const OscState& init,
                            const std::vector<double>& t_samples,
                            TrajectoryKind kind, double t_start) {
    check_samples(profile, t_samples, t_start);
    Trajectory traj{profile, kind, {}};
    traj.samples.reserve(t_samples.size());
    OscState s = init;
    double cur = t_start;
    for (double t : t_samples) {
        walk_pieces(profile, cur, std::min(t, profile.total_time()),
                    [&](double g, double wt, double dt) {
                        s = segment_propagator(g, wt, dt).apply(s);
                    });
        cur = std::min(t, profile.total_time());
        traj.samples.push_back({frequencies_at(profile, t), s});
    }
    return traj;
}

MonodromyResult monodromy(const DriveProfile& profile) {
    Mat2 m = Mat2::identity();
    walk_pieces(profile, 0.0, profile.tau(),
                [&](double g, double wt, double dt) {
                    m = segment_propagator(g, wt, dt) * m;
                });
    MonodromyResult r;
    r.matrix = m;
    const double tr2 = 0.5 * m.trace();
    const double det = m.det();
    const double disc = tr2 * tr2 - det;
    double max_mod;
    if (disc < 0.0) {
        const double im = std::sqrt(-disc);
        r.multipliers = {std::complex<double>(tr2, im),
                         std::complex<double>(tr2, -im)};
        max_mod = std::sqrt(det); // |mu|^2 = det for the complex pair
    } else {
        const double rt = std::sqrt(disc);
        // evaluate the larger root additively, the smaller via the product
        const double big = tr2 >= 0.0 ? tr2 + rt : tr2 - rt;
        const double small = big != 0.0 ? det / big : tr2 - std::copysign(rt, tr2);
        r.multipliers = {std::complex<double>(big, 0.0),
                         std::complex<double>(small, 0.0)};
        max_mod = std::max(std::abs(big), std::abs(small));
    }
    r.ln_max_multiplier = std::log(max_mod);
    r.growth_exponent = r.ln_max_multiplier / profile.tau();
    return r;
}

bool in_band(const MonodromyResult& m) { return m.ln_max_multiplier > 1e-12; }

BandScan scan_bands(const DriveProfile& shape, double x_min, double x_max,
                    int n_points, int threads) {
    if (n_points < 2) throw std::invalid_argument("n_points must be >= 2");
    if (!(x_min > 0.0) || !(x_max > x_min))
        throw std::invalid_argument("need 0 < x_min < x_max");

    BandScan scan;
    scan.points.resize(static_cast<std::size_t>(n_points));
    const double dx = (x_max - x_min) / (n_points - 1);
    detail::parallel_for(scan.points.size(), threads, [&](std::size_t i) {
        const double x = i + 1 == scan.points.size()
                             ? x_max
                             : x_min + dx * static_cast<double>(i);
        const MonodromyResult m = monodromy(scaled_to_omega0_tau(shape, x));
        scan.points[i] = {x, m.growth_exponent, in_band(m)};
    });

    auto in_band_at = [&](double x) {
        return in_band(monodromy(scaled_to_omega0_tau(shape, x)));
    };
    // refine each in/out flip by bisection on the band predicate
    auto refine = [&](double lo, double hi, bool lo_in) {
        for (int it = 0; it < 50; ++it) {
            const double mid = 0.5 * (lo + hi);
            if (in_band_at(mid) == lo_in) lo = mid; else hi = mid;
        }
        return 0.5 * (lo + hi);
    };

    bool open = scan.points.front().in_band;
    double lower = scan.points.front().omega0_tau;
    for (std::size_t i = 0; i + 1 < scan.points.size(); ++i) {
        const auto& a = scan.points[i];
        const auto& b = scan.points[i + 1];
        if (a.in_band == b.in_band) continue;
        const double edge = refine(a.omega0_tau, b.omega0_tau, a.in_band);
        if (!open) {
            lower = edge;
            open = true;
        } else {
            scan.bands.push_back({lower, edge});
            open = false;
        }
    }
    if (open) scan.bands.push_back({lower, scan.points.back().omega0_tau});
    return scan;
}

double classical_energy(const OscState& state, const TimePoint& tp) {
    const double wt = tp.omega_tilde;
    return 0.5 * (state.derivative * state.derivative +
                  wt * wt * state.value * state.value);
}

double hamiltonian_energy(const OscState& state, const TimePoint& tp) {
    const double p = state.derivative / tp.beta;
    return 0.5 * tp.beta * tp.beta *
           (p * p + tp.omega * tp.omega * state.value * state.value);
}

double lr_invariant(const OscState& q_state, const OscState& rho_state,
                    const TimePoint& tp) {
    if (!(rho_state.value > 0.0))
        throw std::domain_error("lr_invariant requires rho > 0");
    const double a = q_state.value / rho_state.value;
    const double b = (q_state.derivative * rho_state.value -
                      rho_state.derivative * q_state.value) / tp.beta;
    return 0.5 * (a * a + b * b);
}

Trajectory propagate_ermakov(const DriveProfile& profile, const OscState& init,
                             const std::vector<double>& t_samples,
                             double t_start) {
    if (!(init.value > 0.0))
        throw std::domain_error("propagate_ermakov requires rho(0) > 0");
    check_samples(profile, t_samples, t_start);

    // Pinney pair: u carries the initial data, v the independent direction
    // with unit rescaled-time slope; W = u v_dot - u_dot v = rho0 is constant
    // in the rescaled frame because the true-time Wronskian contracts by
    // exactly beta.
    OscState u = init;
    OscState v{0.0, beta_at(profile, t_start)};
    const double w = init.value;

    Trajectory traj{profile, TrajectoryKind::ermakov_rho, {}};
    traj.samples.reserve(t_samples.size());
    double cur = t_start;
    for (double t : t_samples) {
        walk_pieces(profile, cur, std::min(t, profile.total_time()),
                    [&](double g, double wt, double dt) {
                        const Mat2 m = segment_propagator(g, wt, dt);
                        u = m.apply(u);
                        v = m.apply(v);
                    });
        cur = std::min(t, profile.total_time());
        const double rho = std::hypot(u.value, v.value / w);
        const double rho_deriv =
            (u.value * u.derivative + v.value * v.derivative / (w * w)) / rho;
        traj.samples.push_back({frequencies_at(profile, t), {rho, rho_deriv}});
    }
    return traj;
}

} // namespace qpr
