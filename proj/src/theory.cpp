#include "bdb/theory.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

#include "bdb/io_util.hpp"
#include "bdb/special_functions.hpp"

namespace bdb {
namespace {

constexpr double kEps = 1e-12;    // integration interval is [kEps, 1-kEps]
constexpr int kPanels = 4096;     // composite Simpson panels
constexpr double kQuadTol = 1e-6;

struct QuadResult {
    double value;
    double error_estimate;
};

// log of the logistic function, stable for any argument
double log_sigmoid(double y) {
    return y > 0.0 ? -std::log1p(std::exp(-y)) : y - std::log1p(std::exp(y));
}

double log_cosh(double y) {
    const double a = std::abs(y);
    return a + std::log1p(std::exp(-2.0 * a)) - std::log(2.0);
}

// E[r] as a ratio of two integrals of exp(log_q(log r, log(1-r))) over
// [kEps, 1-kEps]. Uniform composite panels run on the double-exponentially
// substituted axis r = sigmoid(pi * sinh t), so algebraic endpoint behavior
// of Beta-type densities (exponents below 1) cannot degrade the rule; the
// integrand is evaluated in the log domain and max-shifted before
// exponentiation so large evidence cannot overflow. The error estimate
// compares against the half-resolution rule on the same nodes.
template <typename LogDensity>
QuadResult expectation_ratio(LogDensity&& log_q) {
    // endpoints chosen so the transformed range is exactly [kEps, 1-kEps]
    const double x_max = 0.5 * (std::log1p(-kEps) - std::log(kEps));
    const double t_max = std::asinh(2.0 * x_max / 3.14159265358979323846);
    const double h = 2.0 * t_max / kPanels;

    std::vector<double> logs(kPanels + 1);
    std::vector<double> rs(kPanels + 1);
    double shift = -std::numeric_limits<double>::infinity();
    for (int t = 0; t <= kPanels; ++t) {
        const double u = -t_max + t * h;
        const double x = 0.5 * 3.14159265358979323846 * std::sinh(u);
        const double log_r = log_sigmoid(2.0 * x);
        const double log_1mr = log_sigmoid(-2.0 * x);
        // dr/du = (pi/2) cosh u / cosh^2(x)
        const double log_jac = std::log(0.5 * 3.14159265358979323846) + log_cosh(u) -
                               2.0 * log_cosh(x);
        rs[t] = 1.0 / (1.0 + std::exp(-2.0 * x));
        logs[t] = log_q(log_r, log_1mr) + log_jac;
        if (logs[t] > shift) shift = logs[t];
    }
    if (!std::isfinite(shift))
        throw std::runtime_error("expected_positivity: integrand vanished everywhere");

    auto trapezoid = [&](int stride) {
        double den = 0.0, num = 0.0;
        const int panels = kPanels / stride;
        for (int t = 0; t <= panels; ++t) {
            const int idx = t * stride;
            const double f = std::exp(logs[idx] - shift);
            const double w = (t == 0 || t == panels) ? 0.5 : 1.0;
            den += w * f;
            num += w * f * rs[idx];
        }
        return std::pair<double, double>{num, den};
    };

    const auto [num_full, den_full] = trapezoid(1);
    const auto [num_half, den_half] = trapezoid(2);
    if (den_full <= 0.0)
        throw std::runtime_error("expected_positivity: normalization vanished");
    const double full = num_full / den_full;
    const double half = den_half > 0.0 ? num_half / den_half : full;
    return {full, std::abs(full - half)};
}

}  // namespace

void TheoryParams::validate() const {
    auto in_open_unit = [](double v) { return std::isfinite(v) && v > 0.0 && v < 1.0; };
    if (!in_open_unit(omega)) throw std::invalid_argument("TheoryParams: omega must be in (0,1)");
    if (!in_open_unit(xi)) throw std::invalid_argument("TheoryParams: xi must be in (0,1)");
    if (!(std::isfinite(nu) && nu > 0.0))
        throw std::invalid_argument("TheoryParams: nu must be > 0");
    if (!(std::isfinite(tau) && tau > 0.0))
        throw std::invalid_argument("TheoryParams: tau must be > 0");
    if (!(std::isfinite(gamma) && gamma >= 0.0))
        throw std::invalid_argument("TheoryParams: gamma must be >= 0");
    if (!(std::isfinite(n_evidence) && n_evidence > 0.0))
        throw std::invalid_argument("TheoryParams: n_evidence must be > 0");
}

double model_score(double beta1_prior, double beta0_prior, double beta1_x, double beta0_x) {
    if (beta1_prior < 0.0 || beta0_prior < 0.0 || beta1_x < 0.0 || beta0_x < 0.0)
        throw std::invalid_argument("model_score: inputs must be >= 0");
    const double denom = beta1_prior + beta0_prior + beta1_x + beta0_x;
    if (!(denom > 0.0)) throw std::invalid_argument("model_score: zero denominator");
    return (beta1_prior + beta1_x) / denom;
}

double train_from_model(double s_model, double omega, double gamma) {
    const double s_train = s_model - (omega - s_model) * gamma;
    // tolerate rounding at the exact range endpoints
    constexpr double kSlack = 1e-9;
    if (s_train < -kSlack || s_train > 1.0 + kSlack)
        throw std::invalid_argument("train_from_model: score " + format_double(s_model) +
                                    " is outside the valid range for this (omega, gamma)");
    return std::min(1.0, std::max(0.0, s_train));
}

std::pair<double, double> valid_score_range(double omega, double gamma) {
    const double lo = omega * gamma / (1.0 + gamma);
    const double hi = (1.0 + omega * gamma) / (1.0 + gamma);
    return {lo, hi};
}

double bias_closed_form_tau1(double s_model, const TheoryParams& p) {
    return (s_model * (p.nu - 1.0) + p.omega - p.xi * p.nu) * p.gamma / (1.0 + p.nu * p.gamma);
}

double expected_positivity_general_tau(double s_train, const TheoryParams& p) {
    p.validate();
    if (s_train < 0.0 || s_train > 1.0)
        throw std::invalid_argument("expected_positivity: s_train must be in [0,1]");
    const double lambda = p.lambda();
    const double alpha1 = p.n_evidence * (p.xi * lambda + s_train);
    const double alpha0 = p.n_evidence * ((1.0 - p.xi) * lambda + 1.0 - s_train);
    if (!(alpha1 > 0.0) || !(alpha0 > 0.0))
        throw std::invalid_argument("expected_positivity: degenerate Beta parameters");
    const double n = p.n_evidence;
    const double tau = p.tau;
    const QuadResult q = expectation_ratio([&](double log_r, double log_1mr) {
        // log Beta kernel minus the n-fold sampling tilt; 1+(tau-1)r stays
        // positive for any tau > 0 since r < 1
        const double r = std::exp(log_r);
        return (alpha1 - 1.0) * log_r + (alpha0 - 1.0) * log_1mr -
               n * std::log1p((tau - 1.0) * r);
    });
    if (q.error_estimate > kQuadTol)
        throw std::runtime_error("expected_positivity: quadrature did not converge (estimate " +
                                 format_double(q.error_estimate) + ")");
    return q.value;
}

double beta_entropy(const BetaParams& b) {
    if (!(b.alpha1 > 0.0) || !(b.alpha0 > 0.0))
        throw std::invalid_argument("beta_entropy: parameters must be > 0");
    const double a1 = b.alpha1;
    const double a0 = b.alpha0;
    return log_beta(a0, a1) + (a0 + a1 - 2.0) * digamma(a0 + a1) -
           (a1 - 1.0) * digamma(a1) - (a0 - 1.0) * digamma(a0);
}

std::vector<BiasCurveRow> bias_curve(const TheoryParams& p, const std::vector<double>& s_grid) {
    p.validate();
    const auto [lo, hi] = valid_score_range(p.omega, p.gamma);
    std::vector<BiasCurveRow> rows;
    rows.reserve(s_grid.size());
    constexpr double kSlack = 1e-9;
    for (double s : s_grid) {
        if (s < lo - kSlack || s > hi + kSlack)
            throw std::invalid_argument("bias_curve: score " + format_double(s) +
                                        " outside the valid range [" + format_double(lo) + ", " +
                                        format_double(hi) + "]");
        const double s_train = train_from_model(s, p.omega, p.gamma);
        rows.push_back({s, expected_positivity_general_tau(s_train, p)});
    }
    return rows;
}

}  // namespace bdb
