// qpr - parametric-resonance simulation CLI.
// Subcommands: bands, evolve, spectrum, figures, selftest.
// Exit codes: 0 success, 2 config error, 3 numerical convergence failure.

#include <cmath>
#include <cstdio>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "qpr/config.hpp"
#include "qpr/errors.hpp"
#include "qpr/overlap.hpp"
#include "qpr/scenario.hpp"

namespace {

struct CommonOpts {
    std::string config_path;
    std::string out_dir; // overrides scenario output_dir when set
    int threads = 1;     // 0 = hardware concurrency
};

void add_common(CLI::App* cmd, CommonOpts& opts, bool config_required = true) {
    auto* c = cmd->add_option("--config", opts.config_path, "scenario config file");
    if (config_required) c->required();
    cmd->add_option("--out", opts.out_dir, "output directory (overrides config)");
    cmd->add_option("--threads", opts.threads,
                    "worker threads, 0 = hardware concurrency");
}

std::string resolve_out(const CommonOpts& opts, const std::string& from_config) {
    return opts.out_dir.empty() ? from_config : opts.out_dir;
}

void print_files(const std::vector<std::string>& files) {
    for (const std::string& f : files) std::cout << "wrote " << f << "\n";
}

// Reduced-grid closed-form vs quadrature equivalence check; the full grid
// lives in the acceptance suite.
int run_selftest() {
    using namespace qpr;
    int failures = 0;
    auto report = [&](const std::string& name, double err, double tol) {
        const bool ok = err <= tol;
        if (!ok) ++failures;
        std::printf("[%s] %s: max |closed - quadrature| = %.3e (tol %.0e)\n",
                    ok ? "PASS" : "FAIL", name.c_str(), err, tol);
    };

    double err = 0.0;
    for (double g : {0.5, 5.0}) {
        const GammaValue gv{g, Regime::displaced, g, 1.0};
        for (int m = 0; m <= 8; ++m)
            for (int n = 0; n <= 8; ++n) {
                WaveParams wf;
                wf.alpha = std::sqrt(2.0 * g);
                const double p = overlap_probability(m, n, wf);
                err = std::max(err, std::abs(p - prob_displaced(m, n, gv)));
            }
    }
    report("displaced overlap equivalence", err, 1e-9);

    err = 0.0;
    for (double g : {1.5, 5.0}) {
        for (int m = 0; m <= 8; ++m)
            for (int n = 0; n <= 8; ++n) {
                WaveParams wf;
                // turning-point state with this Gamma: omega rho^2 solves
                // y + 1/y = 4 Gamma - 2
                const double s = 4.0 * g - 2.0;
                const double y = 0.5 * (s + std::sqrt(s * s - 4.0));
                wf.rho = std::sqrt(y);
                const OscState rho_state{wf.rho, 0.0};
                const TimePoint tp{0.0, 1.0, 1.0, 1.0};
                const GammaValue gv = gamma_squeezed(rho_state, tp);
                const double p = overlap_probability(m, n, wf);
                err = std::max(err, std::abs(p - prob_squeezed(m, n, gv)));
            }
    }
    report("squeezed overlap equivalence", err, 1e-9);

    err = 0.0;
    for (double g : {0.5, 5.0}) {
        const GammaValue gv{g, Regime::displaced, g, 1.0};
        for (int m = 0; m <= 8; ++m) {
            const EnergyDistribution d = build_distribution(m, gv);
            err = std::max(err, d.tail_mass);
        }
    }
    report("displaced normalization", err, 1e-10);

    return failures == 0 ? 0 : 3;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"parametric-resonance pipeline: classical auxiliary dynamics, "
                 "Floquet bands, quantum energy-number distributions"};
    app.require_subcommand(1);

    CommonOpts bands_opts, evolve_opts, spectrum_opts, figures_opts;

    CLI::App* bands = app.add_subcommand(
        "bands", "scan Floquet growth exponents over omega0*tau");
    add_common(bands, bands_opts);

    CLI::App* evolve = app.add_subcommand(
        "evolve", "run a scenario: trajectory, Gamma(t), distributions, moments");
    add_common(evolve, evolve_opts);

    CLI::App* spectrum = app.add_subcommand(
        "spectrum", "distribution snapshots at a fixed Gamma");
    add_common(spectrum, spectrum_opts);

    CLI::App* figures = app.add_subcommand(
        "figures", "emit figure data (fig1a, fig1b, fig2)");
    add_common(figures, figures_opts);

    app.add_subcommand("selftest",
                       "closed-form vs quadrature equivalence at a reduced grid");

    CLI11_PARSE(app, argc, argv);

    try {
        if (bands->parsed()) {
            const qpr::RunConfig cfg = qpr::load_config(bands_opts.config_path);
            if (!cfg.profile)
                throw qpr::ConfigError("profile", "section required for bands");
            if (!cfg.bands)
                throw qpr::ConfigError("bands", "section required");
            const std::string out = resolve_out(bands_opts, "out");
            print_files(qpr::scan_bands_cmd(qpr::build_profile(*cfg.profile),
                                            *cfg.bands, out, bands_opts.threads));
        } else if (evolve->parsed()) {
            const qpr::RunConfig cfg = qpr::load_config(evolve_opts.config_path);
            const qpr::ScenarioConfig sc = qpr::resolve_scenario(cfg);
            const std::string out = resolve_out(evolve_opts, sc.output_dir);
            const qpr::ScenarioResult r =
                qpr::run_scenario(sc, out, evolve_opts.threads);
            print_files(r.files);
        } else if (spectrum->parsed()) {
            const qpr::RunConfig cfg = qpr::load_config(spectrum_opts.config_path);
            if (!cfg.spectrum)
                throw qpr::ConfigError("spectrum", "section required");
            const std::string out = resolve_out(spectrum_opts, "out");
            print_files(qpr::emit_spectrum(*cfg.spectrum, out,
                                           spectrum_opts.threads));
        } else if (figures->parsed()) {
            const qpr::RunConfig cfg = qpr::load_config(figures_opts.config_path);
            if (!cfg.figures)
                throw qpr::ConfigError("figures", "section required");
            const std::string out = resolve_out(figures_opts, "out");
            std::cout << "wrote "
                      << qpr::emit_figure_data(*cfg.figures, out,
                                               figures_opts.threads)
                      << "\n";
        } else {
            return run_selftest();
        }
    } catch (const qpr::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const qpr::ConvergenceError& e) {
        std::cerr << "convergence failure: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 0;
}
