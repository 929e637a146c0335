#pragma once
// Score/positivity relations under the Beta-prior generation model: posterior
// score composition, train-positivity inversion, the closed-form bias when
// there is no differential sampling, and the numerical expectation of the
// tilted-Beta positivity distribution for general undersampling.

#include <utility>
#include <vector>

namespace bdb {

struct TheoryParams {
    double omega = 0.5;       // model-prior positive fraction, in (0,1)
    double xi = 0.5;          // global-prior positive fraction, in (0,1)
    double nu = 1.0;          // global priors : model priors, > 0
    double tau = 1.0;         // negative-class undersampling factor, > 0
    double gamma = 0.0;       // model priors : evidence, >= 0
    double n_evidence = 1.0;  // evidence mass, > 0

    double lambda() const { return nu * gamma; }  // global priors : evidence
    void validate() const;
};

struct BetaParams {
    double alpha1 = 1.0;
    double alpha0 = 1.0;
};

// Posterior-style score (prior + evidence pseudo-counts); needs a positive
// denominator.
double model_score(double beta1_prior, double beta0_prior, double beta1_x, double beta0_x);

// Inverts the score composition: train positivity s - (omega - s) * gamma.
// Throws when the result falls outside [0,1], i.e. s is not attainable for
// this (omega, gamma).
double train_from_model(double s_model, double omega, double gamma);

// Attainable score interval for fixed (omega, gamma):
// [omega*gamma/(1+gamma), (1+omega*gamma)/(1+gamma)].
std::pair<double, double> valid_score_range(double omega, double gamma);

// Estimation bias (model score minus expected test positivity) for tau = 1:
// (s*(nu-1) + omega - xi*nu) * gamma / (1 + nu*gamma).
double bias_closed_form_tau1(double s_model, const TheoryParams& p);

// E[r] under Q(r) proportional to
//   Beta(n*(xi*lambda + s_train), n*((1-xi)*lambda + 1 - s_train)) / (1+(tau-1)r)^n,
// computed as a ratio of two log-domain integrals over [1e-12, 1-1e-12],
// 4096 uniform panels on a double-exponentially substituted axis so
// Beta-type endpoint singularities stay benign. Throws if the internal
// convergence estimate exceeds 1e-6. At tau = 1 this reduces to the Beta
// mean (s_train + xi*lambda)/(1 + lambda).
double expected_positivity_general_tau(double s_train, const TheoryParams& p);

// Differential entropy of Beta(alpha1, alpha0).
double beta_entropy(const BetaParams& b);

struct BiasCurveRow {
    double s_model;
    double expected_positivity;
};

// train_from_model followed by expected_positivity_general_tau per grid point.
// Every s must lie inside valid_score_range(p.omega, p.gamma).
std::vector<BiasCurveRow> bias_curve(const TheoryParams& p, const std::vector<double>& s_grid);

}  // namespace bdb
