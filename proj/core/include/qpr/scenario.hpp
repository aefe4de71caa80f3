#pragma once

#include <string>
#include <vector>

#include "qpr/config.hpp"
#include "qpr/spectra.hpp"

namespace qpr {

/// Per-(m, sample-time) record of the distribution pipeline.
struct MomentRow {
    double t = 0.0;
    int m = 0;
    GammaValue gamma;
    double mean = 0.0;
    double stddev = 0.0;
    double mean_asym = 0.0;
    double stddev_asym = 0.0;
    double mean_rel_dev = 0.0;   // (mean - mean_asym)/mean
    double stddev_rel_dev = 0.0; // (stddev - stddev_asym)/max(stddev, tiny)
    double mean_err_bound = 0.0;
    int n_max = 0;
    double tail_mass = 0.0;
};

struct ScenarioResult {
    Trajectory trajectory;              // the active auxiliary function
    std::vector<GammaValue> gammas;     // one per sample time
    std::vector<MomentRow> moments;     // m-major, time-minor
    std::vector<std::string> files;     // paths written, in order
};

/// Runs the configured scenario and writes the result bundle under out_dir:
///   trajectory.csv              sampled auxiliary function + drive scalars
///   gamma.csv                   Gamma, E_cl, beta, omega_tilde per sample
///   dist_m{m}_s{k}.csv          distribution per (m, sample k)
///   moments.csv                 moments vs asymptotic predictions
/// Identical config -> byte-identical files. `threads` parallelizes the
/// distribution builds (0 = hardware concurrency).
ScenarioResult run_scenario(const ScenarioConfig& config,
                            const std::string& out_dir, int threads = 1);

/// Figure-data emission; returns the path written inside out_dir.
///   fig1a: displaced <H>_m / E_cl vs Gamma
///   fig1b: squeezed <H>_m / E_cl vs E_cl/omega_tilde, asymptote m + 1/2
///   fig2:  squeezed stddev/E_cl per m at fixed E_cl/omega_tilde grid,
///          asymptote sqrt((m+1)^2 - m)/sqrt(2)
std::string emit_figure_data(const FiguresSpec& spec, const std::string& out_dir,
                             int threads = 1);

/// Band-scan wrapper: writes bands.csv (omega0_tau, growth_exponent, in_band)
/// and band_edges.csv (refined intervals); returns the paths.
std::vector<std::string> scan_bands_cmd(const DriveProfile& shape,
                                        const BandsSpec& spec,
                                        const std::string& out_dir,
                                        int threads = 1);

/// Distribution snapshots at a fixed Gamma (no dynamics); writes
/// dist_m{m}.csv per entry of m_list plus moments.csv; returns the paths.
std::vector<std::string> emit_spectrum(const SpectrumSpec& spec,
                                       const std::string& out_dir,
                                       int threads = 1);

} // namespace qpr
