#pragma once

#include <vector>

#include "qpr/classical.hpp"
#include "qpr/drive_profile.hpp"

namespace qpr {

enum class Regime { displaced, squeezed };

const char* regime_name(Regime r);

/// The single dimensionless parameter controlling the whole number
/// distribution, together with the classical energy and the energy quantum
/// beta*omega_tilde it was formed from.
///
/// displaced: gamma = E_cl(alpha)/(beta <omega_tilde>), gamma >= 0.
/// squeezed:  gamma = E_cl(rho)/(2 beta omega_tilde) + 1/2 + 1/(4 omega rho^2),
///            gamma >= 1, with equality only at the unperturbed ground width.
struct GammaValue {
    double gamma = 0.0;
    Regime regime = Regime::displaced;
    double e_cl = 0.0;
    double beta_omega_tilde = 0.0;
};

/// Gamma for the wave-packet-centre (displaced) regime. omega_tilde_avg is the
/// period average of omega_tilde (DriveProfile::mean_omega_tilde).
GammaValue gamma_displaced(const OscState& alpha_state, const TimePoint& tp,
                           double omega_tilde_avg);

/// Gamma for the stretched-width (squeezed) regime; rho must be > 0.
GammaValue gamma_squeezed(const OscState& rho_state, const TimePoint& tp);

/// Displaced-regime transition probability
///   P_m(n) = (mu!/nu!) Gamma^|n-m| e^-Gamma [L_mu^|n-m|(Gamma)]^2,
/// mu = min{n,m}, nu = max{n,m}. Evaluated in the log domain with a scaled
/// Laguerre recurrence; symmetric in (m, n). Throws std::invalid_argument on
/// regime mismatch.
double prob_displaced(int m, int n, const GammaValue& gamma);

/// Squeezed-regime transition probability; exactly 0 when n+m is odd.
/// The alternating sum is organized in powers of t = 1 - 1/Gamma so the
/// Gamma -> 1 pole of the naive expansion cancels term by term; at Gamma = 1
/// the distribution is a spike at n = m. Throws std::domain_error for
/// Gamma < 1 and std::invalid_argument on regime mismatch.
double prob_squeezed(int m, int n, const GammaValue& gamma);

/// Truncated number distribution for initial eigenstate m.
struct EnergyDistribution {
    int m = 0;
    GammaValue gamma;
    std::vector<double> probs; // P_m(n) for n = 0..n_max (dense, parity zeros kept)
    int n_max = 0;
    double tail_mass = 0.0;
    double tail_tol = 0.0;
};

/// Accumulates P_m(n) until the cumulative mass reaches 1 - tail_tol and the
/// last 10 computed terms are each below tail_tol/100. tail_tol must lie in
/// (0, 1e-6]. Throws ConvergenceError past n = 10^6.
EnergyDistribution build_distribution(int m, const GammaValue& gamma,
                                      double tail_tol = 1e-12);

/// beta*omega_tilde * sum P(n) (n + 1/2).
double mean_energy(const EnergyDistribution& dist);

/// Bound on the mean-energy error from the truncated tail,
/// tail_mass * (n_max + 3/2) * beta*omega_tilde. Reported alongside the mean,
/// never folded into it.
double mean_energy_error_bound(const EnergyDistribution& dist);

/// beta*omega_tilde * sqrt(sum P n^2 - (sum P n)^2).
double energy_stddev(const EnergyDistribution& dist);

struct Moments {
    double mean = 0.0;
    double stddev = 0.0;
};

/// Large-Gamma laws: displaced -> (E_cl, sqrt(beta*omega_tilde (2m+1) E_cl));
/// squeezed -> (E_cl (m + 1/2), E_cl sqrt((m+1)^2 - m) / sqrt(2)).
/// e_cl must be > 0.
Moments asymptotic_moments(int m, Regime regime, double e_cl,
                           double beta_omega_tilde);

} // namespace qpr
