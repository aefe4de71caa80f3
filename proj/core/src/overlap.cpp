#include "qpr/overlap.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <stdexcept>
#include <vector>

#include "qpr/errors.hpp"
#include "special_functions.hpp"

namespace qpr {

namespace {

// 15-point Kronrod rule with embedded 7-point Gauss (QUADPACK dqk15).
constexpr double kXgk[8] = {
    0.9914553711208126, 0.9491079123427585, 0.8648644233597691,
    0.7415311855993944, 0.5860872354676911, 0.4058451513773972,
    0.2077849550078985, 0.0};
constexpr double kWgk[8] = {
    0.0229353220105292, 0.0630920926299785, 0.1047900103222502,
    0.1406532597155259, 0.1690047266392679, 0.1903505780647854,
    0.2044329400752989, 0.2094821410847278};
constexpr double kWg[4] = {
    0.1294849661688697, 0.2797053914892767, 0.3818300505051189,
    0.4179591836734694};

using Cplx = std::complex<double>;

struct PanelResult {
    Cplx integral;
    double error;
};

template <class F>
PanelResult kronrod15(const F& f, double a, double b) {
    const double c = 0.5 * (a + b);
    const double h = 0.5 * (b - a);
    const Cplx fc = f(c);
    Cplx k = kWgk[7] * fc;
    Cplx g = kWg[3] * fc;
    for (int i = 0; i < 7; ++i) {
        const double dx = h * kXgk[i];
        const Cplx sum = f(c - dx) + f(c + dx);
        k += kWgk[i] * sum;
        if (i % 2 == 1) g += kWg[i / 2] * sum;
    }
    k *= h;
    g *= h;
    return {k, std::abs(k - g)};
}

template <class F>
Cplx adaptive_integrate(const F& f, double a, double b, double abs_tol) {
    struct Panel {
        double a, b;
        Cplx integral;
        double error;
    };
    // pre-split so narrow peaks (and odd integrands vanishing at the centre)
    // cannot fool the error estimate of a single wide panel
    constexpr int kInitialPanels = 32;
    std::vector<Panel> stack;
    const double h0 = (b - a) / kInitialPanels;
    for (int i = 0; i < kInitialPanels; ++i) {
        const double pa = a + i * h0;
        const double pb = i + 1 == kInitialPanels ? b : a + (i + 1) * h0;
        const PanelResult r = kronrod15(f, pa, pb);
        stack.push_back({pa, pb, r.integral, r.error});
    }

    Cplx done{0.0, 0.0};
    double done_err = 0.0;
    long evals = 15 * kInitialPanels;
    const long max_evals = 4000000;
    while (!stack.empty()) {
        Panel p = stack.back();
        stack.pop_back();
        // spend the budget where the error lives; each panel gets its share
        const double local_tol =
            std::max(abs_tol * (p.b - p.a) / (b - a), 1e-300);
        if (p.error <= local_tol || (p.b - p.a) < 1e-14 * (b - a)) {
            done += p.integral;
            done_err += p.error;
            continue;
        }
        if (evals > max_evals)
            throw ConvergenceError("overlap quadrature did not converge");
        const double mid = 0.5 * (p.a + p.b);
        const PanelResult left = kronrod15(f, p.a, mid);
        const PanelResult right = kronrod15(f, mid, p.b);
        evals += 30;
        stack.push_back({p.a, mid, left.integral, left.error});
        stack.push_back({mid, p.b, right.integral, right.error});
    }
    if (done_err > 100.0 * abs_tol)
        throw ConvergenceError("overlap quadrature error estimate " +
                               std::to_string(done_err) + " above tolerance");
    return done;
}

} // namespace

double overlap_probability(int m, int n, const WaveParams& wf, double abs_tol) {
    if (m < 0 || n < 0 || m > 60 || n > 60)
        throw std::invalid_argument("overlap oracle handles 0 <= m, n <= 60");
    if (!(wf.rho > 0.0)) throw std::domain_error("rho must be > 0");
    if (!(wf.omega > 0.0)) throw std::domain_error("omega must be > 0");
    if (!(abs_tol > 0.0)) throw std::invalid_argument("abs_tol must be > 0");

    const double rho = wf.rho;
    const double omega = wf.omega;
    const double sqw = std::sqrt(omega);
    const double quad_phase = 0.5 * wf.rho_dot / rho;
    const double lin_raw = wf.alpha_dot - (wf.rho_dot / rho) * wf.alpha;
    const double lin_phase =
        wf.squared_linear_phase ? lin_raw * lin_raw : lin_raw;
    const double norm = std::pow(omega, 0.25) / std::sqrt(rho);

    auto integrand = [&](double q) -> Cplx {
        const double fn = detail::hermite_function(n, q * sqw);
        const double fm = detail::hermite_function(m, (q - wf.alpha) / rho);
        const double phase = quad_phase * q * q + lin_phase * q;
        return norm * fn * fm * Cplx(std::cos(phase), std::sin(phase));
    };

    // Cover both factors' classical turning points with a wide Gaussian
    // margin; never narrower than 12 max(rho, omega^{-1/2}) around 0 / alpha.
    const double bn = (std::sqrt(2.0 * n + 1.0) + 12.0) / sqw;
    const double bm = (std::sqrt(2.0 * m + 1.0) + 12.0) * rho;
    const double lo = std::min(-bn, wf.alpha - bm);
    const double hi = std::max(bn, wf.alpha + bm);

    const Cplx a = adaptive_integrate(integrand, lo, hi, abs_tol);
    return std::norm(a);
}

} // namespace qpr
