#include "stopwell/belief_filter.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace stopwell {

double log_likelihood_ratio(const ModelParams& p, double t, double log_growth) {
    const double k = (p.mu1 - p.mu0) / (p.sigma * p.sigma);
    return k * (log_growth + 0.5 * (p.sigma * p.sigma - p.mu1 - p.mu0) * t);
}

double posterior_from_log_ratio(double pi0, double log_ratio) {
    if (pi0 <= 0.0) return 0.0;
    if (pi0 >= 1.0) return 1.0;
    // pi L / (1 - pi + pi L) = 1 / (1 + exp(-(logit pi + ln L)))
    const double z = std::log(pi0) - std::log1p(-pi0) + log_ratio;
    if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
    const double e = std::exp(z);
    return e / (1.0 + e);
}

double posterior_f(const ModelParams& p, const FilterInput& in) {
    return posterior_from_log_ratio(in.pi0, log_likelihood_ratio(p, in.t, std::log(in.y / in.x0)));
}

double sde_belief_step(const ModelParams& p, double pi, double dw, double dt) {
    if (!(dt > 0.0)) throw std::invalid_argument("dt must be > 0");
    if (pi <= 0.0) return 0.0;
    if (pi >= 1.0) return 1.0;
    const double next = pi + (p.mu1 - p.mu0) / p.sigma * pi * (1.0 - pi) * dw;
    return std::clamp(next, 0.0, 1.0);
}

namespace {

double log_lognormal_density(double y, double x0, double mu, double sigma, double t) {
    const double m = std::log(x0) + (mu - 0.5 * sigma * sigma) * t;
    const double v = sigma * sigma * t;
    const double d = std::log(y) - m;
    return -0.5 * d * d / v - std::log(y) - 0.5 * std::log(2.0 * std::numbers::pi * v);
}

}  // namespace

double bayes_oracle(const ModelParams& p, const FilterInput& in) {
    if (!(in.t > 0.0)) throw std::invalid_argument("bayes_oracle requires t > 0");
    if (in.pi0 <= 0.0) return 0.0;
    if (in.pi0 >= 1.0) return 1.0;
    const double a0 = std::log1p(-in.pi0) + log_lognormal_density(in.y, in.x0, p.mu0, p.sigma, in.t);
    const double a1 = std::log(in.pi0) + log_lognormal_density(in.y, in.x0, p.mu1, p.sigma, in.t);
    const double hi = std::max(a0, a1);
    const double lse = hi + std::log(std::exp(a0 - hi) + std::exp(a1 - hi));
    return std::exp(a1 - lse);
}

}  // namespace stopwell
