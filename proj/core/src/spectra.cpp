#include "qpr/spectra.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include "qpr/errors.hpp"
#include "special_functions.hpp"

namespace qpr {

namespace {

constexpr long kMaxIndex = 1000000;

// Compensated (Neumaier) accumulator; the distribution sums run over up to
// ~10^5 terms and the tail contract is at the 1e-12 level.
struct Accum {
    double sum = 0.0;
    double c = 0.0;
    void add(double x) {
        const double t = sum + x;
        c += std::abs(sum) >= std::abs(x) ? (sum - t) + x : (x - t) + sum;
        sum = t;
    }
    double value() const { return sum + c; }
};

void require_regime(const GammaValue& g, Regime expected, const char* op) {
    if (g.regime != expected)
        throw std::invalid_argument(std::string(op) +
                                    ": gamma built for the other regime");
}

} // namespace

const char* regime_name(Regime r) {
    return r == Regime::displaced ? "displaced" : "squeezed";
}

GammaValue gamma_displaced(const OscState& alpha_state, const TimePoint& tp,
                           double omega_tilde_avg) {
    if (!(tp.beta > 0.0)) throw std::domain_error("beta must be > 0");
    if (!(omega_tilde_avg > 0.0))
        throw std::domain_error("omega_tilde_avg must be > 0");
    const double a = alpha_state.value;
    const double ad = alpha_state.derivative;
    const double e_cl = 0.5 * (ad * ad + omega_tilde_avg * omega_tilde_avg * a * a);
    const double bow = tp.beta * omega_tilde_avg;
    return {e_cl / bow, Regime::displaced, e_cl, bow};
}

GammaValue gamma_squeezed(const OscState& rho_state, const TimePoint& tp) {
    if (!(rho_state.value > 0.0))
        throw std::domain_error("gamma_squeezed requires rho > 0");
    if (!(tp.beta > 0.0) || !(tp.omega_tilde > 0.0))
        throw std::domain_error("gamma_squeezed requires beta > 0, omega_tilde > 0");
    const double rho = rho_state.value;
    const double e_cl = classical_energy(rho_state, tp);
    const double bow = tp.beta * tp.omega_tilde;
    const double omega = tp.omega_tilde / tp.beta; // stretched frequency
    double g = e_cl / (2.0 * bow) + 0.5 + 1.0 / (4.0 * omega * rho * rho);
    // g >= 1 identically; absorb the last-ulp dip from rounding
    if (g < 1.0) g = 1.0;
    return {g, Regime::squeezed, e_cl, bow};
}

double prob_displaced(int m, int n, const GammaValue& gamma) {
    require_regime(gamma, Regime::displaced, "prob_displaced");
    if (m < 0 || n < 0) throw std::invalid_argument("indices must be >= 0");
    const double g = gamma.gamma;
    if (!(g >= 0.0)) throw std::domain_error("displaced gamma must be >= 0");
    if (g == 0.0) return m == n ? 1.0 : 0.0;

    const int mu = std::min(m, n);
    const int nu = std::max(m, n);
    const int k = nu - mu;
    const detail::SignedLog lag = detail::laguerre_signed_log(mu, k, g);
    if (lag.sign == 0) return 0.0;
    // extended precision for the factorial ratio: at large nu its parts are
    // ~nu ln nu while the ratio's log is what survives
    const double ln_ratio = static_cast<double>(
        std::lgamma(static_cast<long double>(mu) + 1.0L) -
        std::lgamma(static_cast<long double>(nu) + 1.0L));
    const double ln_p = ln_ratio + k * std::log(g) - g + 2.0 * lag.log_abs;
    if (ln_p < -700.0) return 0.0;
    return std::min(std::exp(ln_p), 1.0);
}

double prob_squeezed(int m, int n, const GammaValue& gamma) {
    require_regime(gamma, Regime::squeezed, "prob_squeezed");
    if (m < 0 || n < 0) throw std::invalid_argument("indices must be >= 0");
    const double g = gamma.gamma;
    if (!(g >= 1.0)) throw std::domain_error("squeezed gamma must be >= 1");
    if (((m ^ n) & 1) != 0) return 0.0; // parity selection rule

    const double t = 1.0 - 1.0 / g;
    if (t <= 0.0) return m == n ? 1.0 : 0.0; // g == 1: unperturbed spike

    const bool odd = (m & 1) != 0;
    const int bm = m / 2; // half indices
    const int bn = n / 2;
    const int mu = std::min(bm, bn);
    const double ln_t = std::log(t);
    const double ln_g = std::log(g);

    // A direct expansion in powers of (1-g)^{-1} has a removable pole at
    // g = 1; reorganizing each term as (-1)^j t^{bn+bm-j} (t g)^{-j} keeps
    // everything finite. The large factorials are pulled out of the
    // alternating sum as k!/(bk!)^2 (evaluated in extended precision, since
    // its parts cancel down to O(ln k)) and re-enter the sum as short
    // falling-factorial products.
    const double ln_x = 2.0 * M_LN2 - ln_t - ln_g; // ln of 4/(t g)
    auto ln_big = [](int k, int bk) {
        return static_cast<double>(std::lgamma(static_cast<long double>(k) + 1.0L) -
                                   2.0L * std::lgamma(static_cast<long double>(bk) + 1.0L));
    };
    auto for_each_ln_term = [&](auto&& visit) {
        double ln_ff = 0.0, ln_fact = 0.0;
        for (int j = 0; j <= mu; ++j) {
            if (j > 0) {
                ln_ff += std::log(static_cast<double>(bn - j + 1) * (bm - j + 1));
                const int top = 2 * j + (odd ? 1 : 0);
                ln_fact += std::log(static_cast<double>(top) * (top - 1));
            }
            visit(j, ln_ff + j * ln_x - ln_fact);
        }
    };

    double ln_max = -std::numeric_limits<double>::infinity();
    for_each_ln_term([&](int, double ln) { ln_max = std::max(ln_max, ln); });
    long double s = 0.0L;
    for_each_ln_term([&](int j, double ln) {
        const long double term = std::exp(static_cast<long double>(ln - ln_max));
        s += (j & 1) ? -term : term;
    });
    if (s == 0.0L) return 0.0;

    const double ln_p = ln_big(n, bn) + ln_big(m, bm) -
                        (odd ? 1.5 : 0.5) * ln_g - 2.0 * (bn + bm) * M_LN2 +
                        (bn + bm) * ln_t +
                        2.0 * (ln_max + static_cast<double>(std::log(std::fabs(s))));
    if (ln_p < -700.0) return 0.0;
    return std::min(std::exp(ln_p), 1.0);
}

EnergyDistribution build_distribution(int m, const GammaValue& gamma,
                                      double tail_tol) {
    if (m < 0) throw std::invalid_argument("m must be >= 0");
    if (!(tail_tol > 0.0) || tail_tol > 1e-6)
        throw std::invalid_argument("tail_tol must lie in (0, 1e-6]");

    const bool squeezed = gamma.regime == Regime::squeezed;
    auto prob = [&](long n) {
        return squeezed ? prob_squeezed(m, static_cast<int>(n), gamma)
                        : prob_displaced(m, static_cast<int>(n), gamma);
    };

    EnergyDistribution dist;
    dist.m = m;
    dist.gamma = gamma;
    dist.tail_tol = tail_tol;

    const long step = squeezed ? 2 : 1;
    const double small = tail_tol / 100.0;
    Accum cum;
    int small_run = 0;
    for (long n = squeezed ? (m & 1) : 0;; n += step) {
        if (n > kMaxIndex)
            throw ConvergenceError(
                "distribution truncation did not converge: m=" + std::to_string(m) +
                " gamma=" + std::to_string(gamma.gamma) + " regime=" +
                regime_name(gamma.regime) + " cumulative=" +
                std::to_string(cum.value()) + " at n=" + std::to_string(n));
        const double p = prob(n);
        dist.probs.resize(static_cast<std::size_t>(n) + 1, 0.0);
        dist.probs[static_cast<std::size_t>(n)] = p;
        cum.add(p);
        small_run = p < small ? small_run + 1 : 0;
        if (cum.value() >= 1.0 - tail_tol && small_run >= 10) {
            dist.n_max = static_cast<int>(n);
            break;
        }
    }
    dist.tail_mass = std::max(0.0, 1.0 - cum.value());
    return dist;
}

double mean_energy(const EnergyDistribution& dist) {
    Accum s;
    for (std::size_t n = 0; n < dist.probs.size(); ++n)
        s.add(dist.probs[n] * (static_cast<double>(n) + 0.5));
    return dist.gamma.beta_omega_tilde * s.value();
}

double mean_energy_error_bound(const EnergyDistribution& dist) {
    return dist.tail_mass * (dist.n_max + 1.5) * dist.gamma.beta_omega_tilde;
}

double energy_stddev(const EnergyDistribution& dist) {
    Accum s1, s2;
    for (std::size_t n = 0; n < dist.probs.size(); ++n) {
        const double nn = static_cast<double>(n);
        s1.add(dist.probs[n] * nn);
        s2.add(dist.probs[n] * nn * nn);
    }
    const double var = s2.value() - s1.value() * s1.value();
    return dist.gamma.beta_omega_tilde * std::sqrt(std::max(var, 0.0));
}

Moments asymptotic_moments(int m, Regime regime, double e_cl,
                           double beta_omega_tilde) {
    if (!(e_cl > 0.0)) throw std::domain_error("e_cl must be > 0");
    if (m < 0) throw std::invalid_argument("m must be >= 0");
    if (regime == Regime::displaced)
        return {e_cl, std::sqrt(beta_omega_tilde * (2.0 * m + 1.0) * e_cl)};
    const double md = static_cast<double>(m);
    return {e_cl * (md + 0.5),
            e_cl * std::sqrt(((md + 1.0) * (md + 1.0) - md) / 2.0)};
}

} // namespace qpr
