#pragma once

namespace qpr {

/// State parameters for the brute-force overlap integral. Derivatives are
/// taken with respect to the beta-rescaled time (rho_dot = rho'/beta,
/// alpha_dot = alpha'/beta); omega is the stretched frequency omega_tilde/beta.
///
/// squared_linear_phase switches the linear phase coefficient from
/// (alpha_dot - (rho_dot/rho) alpha) to its square, an alternative convention
/// kept selectable for comparison. The default is the one consistent with the
/// closed-form displaced law.
struct WaveParams {
    double rho = 1.0;
    double rho_dot = 0.0;
    double alpha = 0.0;
    double alpha_dot = 0.0;
    double omega = 1.0;
    bool squared_linear_phase = false;
};

/// Transition probability |<phi_n | psi_m>|^2 computed by adaptive
/// Gauss-Kronrod quadrature of the complex overlap integrand
///   phi_n(q sqrt(omega)) * rho^{-1/2} phi_m((q-alpha)/rho)
///     * exp(i (rho_dot/2rho) q^2 + i (alpha_dot - (rho_dot/rho) alpha) q),
/// with phi_k the normalized Hermite eigenfunctions. Absolute tolerance
/// `abs_tol` on the integral (default 1e-12).
///
/// Deliberately independent of the closed-form probability routes: this is
/// the oracle they are checked against. Requires rho > 0, omega > 0,
/// 0 <= m, n <= 60; throws ConvergenceError if the quadrature fails.
double overlap_probability(int m, int n, const WaveParams& wf,
                           double abs_tol = 1e-12);

} // namespace qpr
