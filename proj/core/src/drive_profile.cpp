#include "qpr/drive_profile.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace qpr {

namespace {

// Accept t = total_time up to a few ulps of overshoot (sample times are often
// produced as k*stride*tau) and clamp it back onto the range.
double checked_time(const DriveProfile& p, double t) {
    if (p.segments().empty())
        throw std::domain_error("empty DriveProfile");
    const double end = p.total_time();
    const double slack = 16.0 * std::numeric_limits<double>::epsilon() * end;
    if (!(t >= 0.0) || t > end + slack)
        throw std::domain_error("time " + std::to_string(t) +
                                " outside simulated range [0, " +
                                std::to_string(end) + "]");
    return std::min(t, end);
}

} // namespace

DriveProfile DriveProfile::make(double omega0, double tau, int n_periods,
                                std::vector<Segment> segments) {
    if (!(omega0 > 0.0)) throw std::invalid_argument("omega0 must be > 0");
    if (!(tau > 0.0)) throw std::invalid_argument("tau must be > 0");
    if (n_periods < 1) throw std::invalid_argument("n_periods must be >= 1");
    if (segments.empty()) throw std::invalid_argument("at least one segment required");

    double sum = 0.0;
    for (std::size_t i = 0; i < segments.size(); ++i) {
        const Segment& s = segments[i];
        const std::string where = "segment " + std::to_string(i);
        if (!(s.duration > 0.0))
            throw std::invalid_argument(where + ": duration must be > 0");
        if (!(std::abs(s.delta) < 1.0))
            throw std::invalid_argument(where + ": |delta| < 1 required");
        if (!(s.gamma >= 0.0))
            throw std::invalid_argument(where + ": gamma must be >= 0");
        sum += s.duration;
    }
    if (std::abs(sum - tau) > 1e-12 * tau)
        throw std::invalid_argument("segment durations sum to " +
                                    std::to_string(sum) + ", expected tau = " +
                                    std::to_string(tau));

    DriveProfile p;
    p.omega0_ = omega0;
    p.tau_ = tau;
    p.n_periods_ = n_periods;
    p.segments_ = std::move(segments);

    const std::size_t n = p.segments_.size();
    p.cum_.resize(n + 1);
    p.cum_exposure_.resize(n + 1);
    p.seg_omega_tilde_.resize(n);
    p.cum_[0] = 0.0;
    p.cum_exposure_[0] = 0.0;
    double mean_wt = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const Segment& s = p.segments_[i];
        p.cum_[i + 1] = p.cum_[i] + s.duration;
        p.cum_exposure_[i + 1] = p.cum_exposure_[i] + s.gamma * s.duration;
        p.seg_omega_tilde_[i] = omega0 * std::sqrt(1.0 - s.delta);
        mean_wt += p.seg_omega_tilde_[i] * s.duration;
    }
    p.cum_[n] = tau; // pin the last boundary so lookups never fall off the end
    p.period_exposure_ = p.cum_exposure_[n];
    p.mean_omega_tilde_ = mean_wt / tau;
    return p;
}

std::size_t DriveProfile::segment_index(double local) const {
    auto it = std::upper_bound(cum_.begin(), cum_.end(), local);
    std::size_t idx = static_cast<std::size_t>(it - cum_.begin());
    if (idx == 0) return 0;                               // local <= 0
    if (idx > segments_.size()) return segments_.size() - 1; // local >= tau
    return idx - 1;
}

double exposure_at(const DriveProfile& profile, double t) {
    t = checked_time(profile, t);
    const double tau = profile.tau();
    double k = std::floor(t / tau);
    double local = t - k * tau;
    if (local >= tau) { k += 1.0; local -= tau; }
    if (local < 0.0) local = 0.0;

    const auto& cum = profile.boundaries();
    const std::size_t idx = profile.segment_index(local);
    const double partial = profile.segments()[idx].gamma * (local - cum[idx]);
    return k * profile.period_exposure() + profile.exposure_prefix(idx) + partial;
}

double beta_at(const DriveProfile& profile, double t) {
    return std::exp(-exposure_at(profile, t));
}

TimePoint frequencies_at(const DriveProfile& profile, double t) {
    const double beta = beta_at(profile, t);
    const double tau = profile.tau();
    double tc = std::min(t, profile.total_time());
    double k = std::floor(tc / tau);
    double local = tc - k * tau;
    if (local >= tau) local -= tau;
    if (local < 0.0) local = 0.0;
    const double wt = profile.segment_omega_tilde(profile.segment_index(local));
    return {t, beta, wt, wt / beta};
}

DriveProfile scaled_to_omega0_tau(const DriveProfile& profile, double x) {
    if (!(x > 0.0)) throw std::invalid_argument("omega0*tau must be > 0");
    const double scale = x / (profile.omega0() * profile.tau());
    std::vector<Segment> segs = profile.segments();
    for (Segment& s : segs) s.duration *= scale;
    return DriveProfile::make(profile.omega0(), profile.tau() * scale, 1,
                              std::move(segs));
}

} // namespace qpr
