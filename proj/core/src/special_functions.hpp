#pragma once

#include <cmath>
#include <limits>

namespace qpr::detail {

struct SignedLog {
    double log_abs = -std::numeric_limits<double>::infinity();
    int sign = 0;
};

// log|L_mu^k(x)| and sign via the upward three-term recurrence
//   (j+1) L_{j+1}^k = (2j+k+1-x) L_j^k - (j+k) L_{j-1}^k,
// carrying a log-scale offset so large degrees/arguments never overflow.
inline SignedLog laguerre_signed_log(int mu, int k, double x) {
    double offset = 0.0;
    double lm1 = 1.0;                      // L_0
    if (mu == 0) return {0.0, 1};
    double l = 1.0 + k - x;                // L_1
    for (int j = 1; j < mu; ++j) {
        const double lp1 = ((2.0 * j + k + 1.0 - x) * l - (j + k) * lm1) / (j + 1.0);
        lm1 = l;
        l = lp1;
        const double mag = std::max(std::abs(l), std::abs(lm1));
        if (mag > 1e250) {
            l *= 1e-250;
            lm1 *= 1e-250;
            offset += 250.0 * M_LN10;
        } else if (mag > 0.0 && mag < 1e-250) {
            l *= 1e250;
            lm1 *= 1e250;
            offset -= 250.0 * M_LN10;
        }
    }
    if (l == 0.0) return {-std::numeric_limits<double>::infinity(), 0};
    return {std::log(std::abs(l)) + offset, l > 0.0 ? 1 : -1};
}

// Normalized Hermite function h_n(x) = H_n(x) e^{-x^2/2} / sqrt(2^n n! sqrt(pi));
// the Gaussian is folded into the recurrence so nothing overflows.
inline double hermite_function(int n, double x) {
    const double h0 = std::exp(-0.5 * x * x) / std::pow(M_PI, 0.25);
    if (n == 0) return h0;
    double hm1 = h0;
    double h = M_SQRT2 * x * h0;
    for (int j = 1; j < n; ++j) {
        const double hp1 =
            std::sqrt(2.0 / (j + 1.0)) * x * h - std::sqrt(j / (j + 1.0)) * hm1;
        hm1 = h;
        h = hp1;
    }
    return h;
}

} // namespace qpr::detail
