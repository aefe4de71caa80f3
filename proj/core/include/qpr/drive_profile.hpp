#pragma once

#include <vector>

namespace qpr {

/// One piecewise-constant slice of the drive: for `duration` the squared
/// frequency is omega0^2*(1-delta) and the dissipation rate is gamma.
struct Segment {
    double duration = 0.0; // time, > 0
    double delta = 0.0;    // dimensionless, |delta| < 1
    double gamma = 0.0;    // 1/time, >= 0

    bool operator==(const Segment&) const = default;
};

/// Snapshot of the elementary time-dependent scalars at one instant.
/// omega is the stretched frequency omega_tilde/beta; beta(0) = 1 and beta is
/// non-increasing, so omega >= omega_tilde always.
struct TimePoint {
    double t = 0.0;
    double beta = 1.0;
    double omega_tilde = 0.0;
    double omega = 0.0;
};

/// Periodic piecewise-constant drive: base frequency omega0, period tau,
/// segments covering exactly one period, repeated n_periods times.
///
/// Validated at construction; immutable afterwards. Segment intervals are
/// right-open, and t = k*tau maps to the first segment of period k.
class DriveProfile {
public:
    /// Empty placeholder; any evaluation on it throws. Build real profiles
    /// with make().
    DriveProfile() = default;

    /// Throws std::invalid_argument if any invariant fails:
    /// omega0 > 0, tau > 0, n_periods >= 1, at least one segment,
    /// every duration > 0, |delta| < 1, gamma >= 0, and
    /// |sum(durations) - tau| <= 1e-12 * tau.
    static DriveProfile make(double omega0, double tau, int n_periods,
                             std::vector<Segment> segments);

    double omega0() const noexcept { return omega0_; }
    double tau() const noexcept { return tau_; }
    int n_periods() const noexcept { return n_periods_; }
    const std::vector<Segment>& segments() const noexcept { return segments_; }

    /// End of the simulated range, n_periods * tau.
    double total_time() const noexcept { return n_periods_ * tau_; }

    /// Integral of gamma over one full period.
    double period_exposure() const noexcept { return period_exposure_; }

    /// Arithmetic period average of omega_tilde(t).
    double mean_omega_tilde() const noexcept { return mean_omega_tilde_; }

    /// omega_tilde of segment i, omega0 * sqrt(1 - delta_i).
    double segment_omega_tilde(std::size_t i) const { return seg_omega_tilde_[i]; }

    /// Cumulative segment start offsets within one period; size() + 1 entries,
    /// first 0, last tau.
    const std::vector<double>& boundaries() const noexcept { return cum_; }

    /// Integral of gamma from the period start to boundary i.
    double exposure_prefix(std::size_t i) const { return cum_exposure_[i]; }

    /// Index of the segment active at local time u in [0, tau); right-open.
    std::size_t segment_index(double local) const;

    bool operator==(const DriveProfile&) const = default;

private:
    double omega0_ = 0.0;
    double tau_ = 0.0;
    int n_periods_ = 0;
    std::vector<Segment> segments_;
    std::vector<double> cum_;          // boundaries, cum_[0] = 0, cum_[n] = tau
    std::vector<double> cum_exposure_; // integral of gamma up to each boundary
    std::vector<double> seg_omega_tilde_;
    double period_exposure_ = 0.0;
    double mean_omega_tilde_ = 0.0;
};

/// Damping factor beta(t) = exp(-Integral_0^t gamma), evaluated in closed form
/// from the per-segment exposures. Throws std::domain_error outside
/// [0, n_periods*tau].
double beta_at(const DriveProfile& profile, double t);

/// Integral of gamma over [0, t]; same domain rules as beta_at.
double exposure_at(const DriveProfile& profile, double t);

/// Full (t, beta, omega_tilde, omega) snapshot; segment boundaries resolve to
/// the right-open segment, and t = total_time wraps to the first segment.
TimePoint frequencies_at(const DriveProfile& profile, double t);

/// Copy of `profile` stretched so that omega0*tau equals x: the period and all
/// segment durations scale by x/(omega0*tau); omega0, delta and the gamma
/// *rates* are kept. Used for band scans. n_periods is reset to 1.
DriveProfile scaled_to_omega0_tau(const DriveProfile& profile, double x);

} // namespace qpr
