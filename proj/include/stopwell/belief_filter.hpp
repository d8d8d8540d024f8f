// Explicit posterior for the hidden drift given the current profit level.
//
// Because log X_t is a Brownian motion whose drift is one of two values, the
// belief at time t depends on the path only through (t, X_t):
//
//   logit Pi_t = logit pi + k (ln(X_t / x) + 0.5 (sigma^2 - mu0 - mu1) t),
//   k = (mu1 - mu0) / sigma^2.
//
// Estimators therefore never integrate the filter SDE; sde_belief_step is kept
// only to cross-check this map in tests.
#pragma once

#include "stopwell/model.hpp"

namespace stopwell {

struct FilterInput {
    double t;    // elapsed time >= 0
    double x0;   // profit level at time 0
    double pi0;  // prior P(theta = 1)
    double y;    // profit level at time t
};

/// Log likelihood ratio ln(dP_1 / dP_0) of observing y at time t, given x0.
double log_likelihood_ratio(const ModelParams& params, double t, double log_growth);

/// Posterior from a prior and a log likelihood ratio; pi0 in {0,1} is returned exactly.
double posterior_from_log_ratio(double pi0, double log_ratio);

/// Pi_t = f(t, x0, pi0, y).
double posterior_f(const ModelParams& params, const FilterInput& in);

/// One Euler step of dPi = (mu1 - mu0)/sigma Pi (1 - Pi) dWbar, clamped to [0,1].
/// dw is the innovation increment. Test surface only.
double sde_belief_step(const ModelParams& params, double pi, double dw, double dt);

/// Posterior computed directly from the two lognormal transition densities of
/// X_t. Requires t > 0.
double bayes_oracle(const ModelParams& params, const FilterInput& in);

}  // namespace stopwell
