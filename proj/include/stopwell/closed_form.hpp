// Analytic quantities of the known-drift problems and the lower bound for the
// boundary function. Everything here is closed form; the stochastic modules
// are checked against it.
#pragma once

#include "stopwell/model.hpp"

namespace stopwell {

struct ClosedFormPack {
    double beta0;   // root > 1 of the fundamental quadratic with mu0
    double beta1;   // root > 1 with mu1
    double xstar0;  // known-drift threshold for mu0
    double xstar1;  // known-drift threshold for mu1
    ModelParams params;

    double beta(int which) const { return which == 0 ? beta0 : beta1; }
    double xstar(int which) const { return which == 0 ? xstar0 : xstar1; }
};

/// Root > 1 of 0.5 sigma^2 b (b - 1) + mu_i b - r = 0, via the cancellation-free branch.
double solve_beta(const ModelParams& params, int which);

/// Relative residual |q(beta)| / (0.5 sigma^2 beta^2 + |mu| beta + r).
double beta_residual(const ModelParams& params, int which, double beta);

/// Validates params and computes both roots and thresholds.
ClosedFormPack make_pack(const ModelParams& params);

/// x*_i = beta_i / (beta_i - 1) (r - mu_i) I.
double threshold(const ClosedFormPack& pack, int which);

/// Alternative form (r + 0.5 sigma^2 beta_i) I; equal to threshold() algebraically.
double threshold_alt(const ClosedFormPack& pack, int which);

/// Full-information value with drift mu_i: g(x, i) beyond x*_i, otherwise
/// (x / x*_i)^beta_i (x*_i / (r - mu_i) - I).
double known_drift_value(const ClosedFormPack& pack, int which, double x);

/// Analytic lower bound for the boundary; decreasing from x*_0 to x*_1.
double lower_bound_b(const ClosedFormPack& pack, double pi);

/// Expected payoff of investing when X first reaches x * delta (delta >= 1).
double delta_strategy_payoff_h(const ClosedFormPack& pack, const State& s, double delta);

/// d h / d delta at delta = 1.
double delta_strategy_slope_at_one(const ClosedFormPack& pack, const State& s);

/// E[exp(-r gamma)] for the first time X reaches delta * x, mixed over theta.
double level_hit_discount(const ClosedFormPack& pack, double pi, double delta);

}  // namespace stopwell
