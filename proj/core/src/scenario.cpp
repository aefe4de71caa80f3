#include "qpr/scenario.hpp"

#include <cmath>
#include <filesystem>

#include "qpr/errors.hpp"

#include "csv_util.hpp"
#include "parallel.hpp"

namespace qpr {

namespace fs = std::filesystem;
using detail::CsvBuilder;
using detail::fmt17;

namespace {

const char* kind_name(TrajectoryKind k) {
    switch (k) {
        case TrajectoryKind::linear_q: return "linear-q";
        case TrajectoryKind::linear_alpha: return "linear-alpha";
        case TrajectoryKind::ermakov_rho: return "ermakov-rho";
    }
    return "?";
}

std::string join(const std::string& dir, const std::string& name) {
    return (fs::path(dir) / name).string();
}

void write_trajectory_csv(const Trajectory& traj, const std::string& path) {
    CsvBuilder csv;
    csv.comment("auxiliary-function trajectory, kind = " +
                std::string(kind_name(traj.kind)));
    csv.comment("columns: t [time], beta [-], omega_tilde [rad/time], "
                "omega [rad/time], value, derivative [value/time]");
    csv.raw("t,beta,omega_tilde,omega,value,derivative");
    for (const TrajectorySample& s : traj.samples)
        csv.row(s.at.t, s.at.beta, s.at.omega_tilde, s.at.omega, s.state.value,
                s.state.derivative);
    csv.write(path);
}

void write_gamma_csv(const Trajectory& traj,
                     const std::vector<GammaValue>& gammas,
                     const std::string& path) {
    CsvBuilder csv;
    csv.comment("columns: t [time], gamma [-], e_cl [energy], beta [-], "
                "omega_tilde [rad/time], beta_omega_tilde [energy]");
    csv.raw("t,gamma,e_cl,beta,omega_tilde,beta_omega_tilde");
    for (std::size_t i = 0; i < gammas.size(); ++i) {
        const TimePoint& tp = traj.samples[i].at;
        const GammaValue& g = gammas[i];
        csv.row(tp.t, g.gamma, g.e_cl, tp.beta, tp.omega_tilde,
                g.beta_omega_tilde);
    }
    csv.write(path);
}

void write_distribution_csv(const EnergyDistribution& dist,
                            const std::string& path) {
    CsvBuilder csv;
    csv.comment("m=" + std::to_string(dist.m) + ", gamma=" + fmt17(dist.gamma.gamma) +
                ", regime=" + regime_name(dist.gamma.regime) +
                ", beta_omega_tilde=" + fmt17(dist.gamma.beta_omega_tilde) +
                ", n_max=" + std::to_string(dist.n_max) +
                ", tail_mass=" + fmt17(dist.tail_mass));
    csv.comment("columns: n [-], P [-], cumulative [-]");
    csv.raw("n,P,cumulative");
    double cum = 0.0;
    for (std::size_t n = 0; n < dist.probs.size(); ++n) {
        cum += dist.probs[n];
        csv.row(static_cast<int>(n), dist.probs[n], cum);
    }
    csv.write(path);
}

MomentRow make_moment_row(double t, int m, const EnergyDistribution& dist) {
    MomentRow row;
    row.t = t;
    row.m = m;
    row.gamma = dist.gamma;
    row.mean = mean_energy(dist);
    row.stddev = energy_stddev(dist);
    if (dist.gamma.e_cl > 0.0) {
        const Moments asym = asymptotic_moments(m, dist.gamma.regime,
                                                dist.gamma.e_cl,
                                                dist.gamma.beta_omega_tilde);
        row.mean_asym = asym.mean;
        row.stddev_asym = asym.stddev;
    }
    row.mean_rel_dev = row.mean != 0.0 ? (row.mean - row.mean_asym) / row.mean : 0.0;
    row.stddev_rel_dev =
        row.stddev != 0.0 ? (row.stddev - row.stddev_asym) / row.stddev : 0.0;
    row.mean_err_bound = mean_energy_error_bound(dist);
    row.n_max = dist.n_max;
    row.tail_mass = dist.tail_mass;
    return row;
}

void write_moments_csv(const std::vector<MomentRow>& rows,
                       const std::string& path) {
    CsvBuilder csv;
    csv.comment("columns: t [time], m [-], gamma [-], mean [energy], "
                "stddev [energy], mean_asym [energy], stddev_asym [energy], "
                "mean_rel_dev [-], stddev_rel_dev [-], mean_err_bound [energy], "
                "n_max [-], tail_mass [-]");
    csv.comment("rel devs are (value - asymptote)/value; asymptotes are 0 when "
                "e_cl = 0 (no perturbation)");
    csv.raw("t,m,gamma,mean,stddev,mean_asym,stddev_asym,mean_rel_dev,"
            "stddev_rel_dev,mean_err_bound,n_max,tail_mass");
    for (const MomentRow& r : rows)
        csv.row(r.t, r.m, r.gamma.gamma, r.mean, r.stddev, r.mean_asym,
                r.stddev_asym, r.mean_rel_dev, r.stddev_rel_dev,
                r.mean_err_bound, r.n_max, r.tail_mass);
    csv.write(path);
}

} // namespace

ScenarioResult run_scenario(const ScenarioConfig& config,
                            const std::string& out_dir, int threads) {
    fs::create_directories(out_dir);
    const DriveProfile& profile = config.profile;
    const std::vector<double>& times = config.sample_times;

    ScenarioResult result;
    if (config.regime == Regime::displaced) {
        const OscState init{config.alpha0, config.alpha_deriv0};
        result.trajectory = propagate_linear(profile, init, times,
                                             TrajectoryKind::linear_alpha);
        const double avg = profile.mean_omega_tilde();
        result.gammas.reserve(times.size());
        for (const TrajectorySample& s : result.trajectory.samples)
            result.gammas.push_back(gamma_displaced(s.state, s.at, avg));
    } else {
        const double wt0 = frequencies_at(profile, 0.0).omega_tilde;
        const OscState init{1.0 / std::sqrt(wt0) + config.rho_offset,
                            config.rho_deriv0};
        result.trajectory = propagate_ermakov(profile, init, times);
        result.gammas.reserve(times.size());
        for (const TrajectorySample& s : result.trajectory.samples)
            result.gammas.push_back(gamma_squeezed(s.state, s.at));
    }

    const std::size_t nt = times.size();
    const std::size_t nm = config.m_list.size();
    std::vector<EnergyDistribution> dists(nm * nt);
    detail::parallel_for(dists.size(), threads, [&](std::size_t i) {
        const int m = config.m_list[i / nt];
        const GammaValue& g = result.gammas[i % nt];
        try {
            dists[i] = build_distribution(m, g, config.tail_tol);
        } catch (const ConvergenceError& e) {
            throw ConvergenceError("scenario sample t=" +
                                   std::to_string(times[i % nt]) + ": " +
                                   e.what());
        }
    });

    result.moments.reserve(dists.size());
    for (std::size_t i = 0; i < dists.size(); ++i)
        result.moments.push_back(make_moment_row(
            times[i % nt], config.m_list[i / nt], dists[i]));

    // file writes happen serially, in a fixed order
    const std::string traj_path = join(out_dir, "trajectory.csv");
    write_trajectory_csv(result.trajectory, traj_path);
    result.files.push_back(traj_path);

    const std::string gamma_path = join(out_dir, "gamma.csv");
    write_gamma_csv(result.trajectory, result.gammas, gamma_path);
    result.files.push_back(gamma_path);

    for (std::size_t i = 0; i < dists.size(); ++i) {
        const std::string path =
            join(out_dir, "dist_m" + std::to_string(config.m_list[i / nt]) +
                              "_s" + std::to_string(i % nt) + ".csv");
        write_distribution_csv(dists[i], path);
        result.files.push_back(path);
    }

    const std::string moments_path = join(out_dir, "moments.csv");
    write_moments_csv(result.moments, moments_path);
    result.files.push_back(moments_path);
    return result;
}

std::string emit_figure_data(const FiguresSpec& spec, const std::string& out_dir,
                             int threads) {
    fs::create_directories(out_dir);
    std::vector<int> ms = spec.m_list;
    if (ms.empty()) ms = {0, 1, 2, 3, 4, 5};
    for (int m : ms)
        if (m < 0) throw ConfigError("figures.m_list", "indices must be >= 0");

    CsvBuilder csv;
    std::string path;

    if (spec.kind == "fig1a") {
        std::vector<double> gammas = spec.gammas;
        if (gammas.empty())
            gammas = {0.1, 0.3, 1.0, 3.0, 10.0, 30.0, 100.0, 300.0, 1000.0};
        for (double g : gammas)
            if (!(g > 0.0)) throw ConfigError("figures.gammas", "must be > 0");
        struct Row { double g; int m; double ratio; };
        std::vector<Row> rows(gammas.size() * ms.size());
        detail::parallel_for(rows.size(), threads, [&](std::size_t i) {
            const double g = gammas[i / ms.size()];
            const int m = ms[i % ms.size()];
            const GammaValue gv{g, Regime::displaced, g, 1.0}; // beta*<omega_tilde> = 1
            const EnergyDistribution dist = build_distribution(m, gv);
            rows[i] = {g, m, mean_energy(dist) / gv.e_cl};
        });
        csv.comment("displaced regime: ratio of the mean quantum energy to E_cl vs Gamma");
        csv.comment("columns: gamma [-], m [-], ratio [-]");
        csv.raw("gamma,m,ratio");
        for (const Row& r : rows) csv.row(r.g, r.m, r.ratio);
        path = join(out_dir, "fig1a.csv");
    } else if (spec.kind == "fig1b" || spec.kind == "fig2") {
        std::vector<double> grid = spec.ecl_over_omega;
        if (grid.empty()) grid = {10.0, 100.0};
        for (double r : grid)
            if (!(r >= 2.0))
                throw ConfigError("figures.ecl_over_omega",
                                  "need E_cl/omega_tilde >= 2 for a squeezed state");
        // analytic states: beta = 1, omega_tilde = 1, rho at a turning point,
        // so e_cl = rho^2/2 = R exactly
        const TimePoint tp{0.0, 1.0, 1.0, 1.0};
        struct Cell { double mean_ratio; double stddev_ratio; };
        std::vector<Cell> cells(grid.size() * ms.size());
        detail::parallel_for(cells.size(), threads, [&](std::size_t i) {
            const double r = grid[i / ms.size()];
            const int m = ms[i % ms.size()];
            const OscState rho_state{std::sqrt(2.0 * r), 0.0};
            const GammaValue gv = gamma_squeezed(rho_state, tp);
            const EnergyDistribution dist = build_distribution(m, gv);
            cells[i] = {mean_energy(dist) / gv.e_cl, energy_stddev(dist) / gv.e_cl};
        });
        if (spec.kind == "fig1b") {
            csv.comment("squeezed regime: ratio of the mean quantum energy to "
                        "E_cl vs E_cl/omega_tilde; asymptote is m + 1/2");
            csv.comment("columns: ecl_over_omega [-], m [-], ratio [-], asymptote [-]");
            csv.raw("ecl_over_omega,m,ratio,asymptote");
            for (std::size_t i = 0; i < cells.size(); ++i)
                csv.row(grid[i / ms.size()], ms[i % ms.size()],
                        cells[i].mean_ratio, ms[i % ms.size()] + 0.5);
            path = join(out_dir, "fig1b.csv");
        } else {
            csv.comment("squeezed regime: energy stddev over E_cl per m; "
                        "asymptote is sqrt((m+1)^2 - m)/sqrt(2)");
            std::string header = "m";
            for (double r : grid) header += ",ratio_ecl_" + fmt17(r);
            header += ",asymptote";
            csv.comment("columns: m [-], one ratio column [-] per "
                        "E_cl/omega_tilde grid value, asymptote [-]");
            csv.raw(header);
            for (std::size_t j = 0; j < ms.size(); ++j) {
                std::string line = std::to_string(ms[j]);
                for (std::size_t k = 0; k < grid.size(); ++k)
                    line += "," + fmt17(cells[k * ms.size() + j].stddev_ratio);
                const double md = ms[j];
                line += "," + fmt17(std::sqrt(((md + 1.0) * (md + 1.0) - md) / 2.0));
                csv.raw(line);
            }
            path = join(out_dir, "fig2.csv");
        }
    } else {
        throw ConfigError("figures.kind",
                          "expected fig1a, fig1b or fig2, got '" + spec.kind + "'");
    }
    csv.write(path);
    return path;
}

std::vector<std::string> scan_bands_cmd(const DriveProfile& shape,
                                        const BandsSpec& spec,
                                        const std::string& out_dir,
                                        int threads) {
    if (!(spec.x_min > 0.0) || !(spec.x_max > spec.x_min))
        throw ConfigError("bands.x_min", "need 0 < x_min < x_max");
    if (spec.n_points < 2) throw ConfigError("bands.n_points", "must be >= 2");
    fs::create_directories(out_dir);

    const BandScan scan = scan_bands(shape, spec.x_min, spec.x_max,
                                     spec.n_points, threads);
    CsvBuilder points;
    points.comment("columns: omega0_tau [-], growth_exponent [1/time], in_band [0/1]");
    points.raw("omega0_tau,growth_exponent,in_band");
    for (const BandScanPoint& p : scan.points)
        points.row(p.omega0_tau, p.growth_exponent, p.in_band ? 1 : 0);
    const std::string points_path = join(out_dir, "bands.csv");
    points.write(points_path);

    CsvBuilder edges;
    edges.comment("refined parametric-resonance intervals in omega0*tau");
    edges.comment("columns: lower [-], upper [-]");
    edges.raw("lower,upper");
    for (const BandInterval& b : scan.bands) edges.row(b.lower, b.upper);
    const std::string edges_path = join(out_dir, "band_edges.csv");
    edges.write(edges_path);

    return {points_path, edges_path};
}

std::vector<std::string> emit_spectrum(const SpectrumSpec& spec,
                                       const std::string& out_dir, int threads) {
    fs::create_directories(out_dir);
    Regime regime;
    if (spec.regime == "displaced") regime = Regime::displaced;
    else if (spec.regime == "squeezed") regime = Regime::squeezed;
    else throw ConfigError("spectrum.regime", "expected 'displaced' or 'squeezed'");
    if (regime == Regime::displaced && !(spec.gamma >= 0.0))
        throw ConfigError("spectrum.gamma", "must be >= 0");
    if (regime == Regime::squeezed && !(spec.gamma >= 1.0))
        throw ConfigError("spectrum.gamma", "must be >= 1 in the squeezed regime");
    if (!(spec.beta_omega_tilde > 0.0))
        throw ConfigError("spectrum.beta_omega_tilde", "must be > 0");
    if (spec.m_list.empty()) throw ConfigError("spectrum.m_list", "must be nonempty");
    if (!(spec.tail_tol > 0.0) || spec.tail_tol > 1e-6)
        throw ConfigError("spectrum.tail_tol", "must lie in (0, 1e-6]");

    // E_cl from the asymptotic identification: Gamma*bow (displaced),
    // 2*bow*(Gamma - 1/2) (squeezed, width term dropped)
    const double e_cl = regime == Regime::displaced
                            ? spec.gamma * spec.beta_omega_tilde
                            : 2.0 * spec.beta_omega_tilde * (spec.gamma - 0.5);
    const GammaValue gv{spec.gamma, regime, e_cl, spec.beta_omega_tilde};

    std::vector<EnergyDistribution> dists(spec.m_list.size());
    detail::parallel_for(dists.size(), threads, [&](std::size_t i) {
        dists[i] = build_distribution(spec.m_list[i], gv, spec.tail_tol);
    });

    std::vector<std::string> paths;
    std::vector<MomentRow> rows;
    for (std::size_t i = 0; i < dists.size(); ++i) {
        const std::string path =
            join(out_dir, "dist_m" + std::to_string(spec.m_list[i]) + ".csv");
        write_distribution_csv(dists[i], path);
        paths.push_back(path);
        rows.push_back(make_moment_row(0.0, spec.m_list[i], dists[i]));
    }
    const std::string moments_path = join(out_dir, "moments.csv");
    write_moments_csv(rows, moments_path);
    paths.push_back(moments_path);
    return paths;
}

} // namespace qpr
