#pragma once

#include <optional>
#include <string>
#include <vector>

#include "qpr/drive_profile.hpp"
#include "qpr/spectra.hpp"

namespace qpr {

// Scenario configs are flat structured text: one [section] per table,
// key = value lines, [[segment]] tables repeated in order. '#' starts a
// comment. Numbers parse as doubles; lists are whitespace-separated.
// See README for the full schema.

struct ProfileSpec {
    double omega0 = 0.0;
    double tau = 0.0;
    int n_periods = 0;
    std::vector<Segment> segments;

    bool operator==(const ProfileSpec&) const = default;
};

struct ScenarioSpec {
    std::string regime; // "displaced" | "squeezed"
    std::vector<int> m_list;
    double alpha0 = 0.0;      // displaced: alpha(0)
    double alpha_deriv0 = 0.0; // displaced: alpha'(0)
    double rho_offset = 0.0;  // squeezed: rho(0) - omega_tilde(0)^{-1/2}
    double rho_deriv0 = 0.0;  // squeezed: rho'(0)
    std::vector<double> sample_times; // explicit, or empty when stride/count set
    int sample_stride = 0;            // periods between samples
    int sample_count = 0;
    double tail_tol = 1e-12;
    std::string output_dir = "out";

    bool operator==(const ScenarioSpec&) const = default;
};

struct BandsSpec {
    double x_min = 0.0;
    double x_max = 0.0;
    int n_points = 0;

    bool operator==(const BandsSpec&) const = default;
};

struct FiguresSpec {
    std::string kind; // "fig1a" | "fig1b" | "fig2"
    std::vector<int> m_list;
    std::vector<double> gammas;         // fig1a grid
    std::vector<double> ecl_over_omega; // fig1b / fig2 grid

    bool operator==(const FiguresSpec&) const = default;
};

struct SpectrumSpec {
    std::string regime;
    double gamma = 0.0;
    double beta_omega_tilde = 1.0;
    std::vector<int> m_list;
    double tail_tol = 1e-12;

    bool operator==(const SpectrumSpec&) const = default;
};

struct RunConfig {
    std::optional<ProfileSpec> profile;
    std::optional<ScenarioSpec> scenario;
    std::optional<BandsSpec> bands;
    std::optional<FiguresSpec> figures;
    std::optional<SpectrumSpec> spectrum;

    bool operator==(const RunConfig&) const = default;
};

/// Parses config text; throws ConfigError naming the offending field.
RunConfig parse_config(const std::string& text);

/// Reads and parses a config file; throws ConfigError on I/O failure too.
RunConfig load_config(const std::string& path);

/// Canonical text form; parse(serialize(parse(x))) == parse(x).
std::string serialize_config(const RunConfig& config);

/// Validated domain profile from the raw spec (ConfigError on violation).
DriveProfile build_profile(const ProfileSpec& spec);

/// Fully validated scenario: profile built, regime resolved, perturbation
/// checked for regime consistency, sample times resolved and range-checked.
struct ScenarioConfig {
    DriveProfile profile;
    Regime regime = Regime::displaced;
    std::vector<int> m_list;
    double alpha0 = 0.0;
    double alpha_deriv0 = 0.0;
    double rho_offset = 0.0;
    double rho_deriv0 = 0.0;
    std::vector<double> sample_times;
    double tail_tol = 1e-12;
    std::string output_dir = "out";
};

ScenarioConfig resolve_scenario(const RunConfig& config);

} // namespace qpr
