#include "stopwell/closed_form.hpp"

#include <cmath>
#include <stdexcept>

namespace stopwell {

double solve_beta(const ModelParams& p, int which) {
    const double mu = drift(p, which);
    const double a = 0.5 * p.sigma * p.sigma;
    const double b = mu - a;
    const double c = -p.r;
    const double disc = std::sqrt(b * b - 4.0 * a * c);
    // c < 0 so the roots have opposite signs; pick the positive one without
    // subtracting nearly equal quantities.
    if (b >= 0.0) return (2.0 * c) / (-b - disc);
    return (-b + disc) / (2.0 * a);
}

double beta_residual(const ModelParams& p, int which, double beta) {
    const double mu = drift(p, which);
    const double s2 = 0.5 * p.sigma * p.sigma;
    const double q = s2 * beta * (beta - 1.0) + mu * beta - p.r;
    const double scale = s2 * beta * beta + s2 * beta + std::abs(mu) * beta + p.r;
    return std::abs(q) / scale;
}

ClosedFormPack make_pack(const ModelParams& params) {
    ClosedFormPack pack{};
    pack.params = validate(params);
    pack.beta0 = solve_beta(params, 0);
    pack.beta1 = solve_beta(params, 1);
    pack.xstar0 = threshold(pack, 0);
    pack.xstar1 = threshold(pack, 1);
    return pack;
}

double threshold(const ClosedFormPack& pack, int which) {
    const double b = pack.beta(which);
    const auto& p = pack.params;
    return b / (b - 1.0) * (p.r - drift(p, which)) * p.invest_cost;
}

double threshold_alt(const ClosedFormPack& pack, int which) {
    const auto& p = pack.params;
    return (p.r + 0.5 * p.sigma * p.sigma * pack.beta(which)) * p.invest_cost;
}

double known_drift_value(const ClosedFormPack& pack, int which, double x) {
    const auto& p = pack.params;
    const double xs = pack.xstar(which);
    const double growth = p.r - drift(p, which);
    if (x >= xs) return x / growth - p.invest_cost;
    if (x <= 0.0) return 0.0;
    return std::pow(x / xs, pack.beta(which)) * (xs / growth - p.invest_cost);
}

double lower_bound_b(const ClosedFormPack& pack, double pi) {
    const auto& p = pack.params;
    const double num = pack.beta0 * (1.0 - pi) + pack.beta1 * pi;
    const double den = (pack.beta0 - 1.0) * (1.0 - pi) / (p.r - p.mu0)
                     + (pack.beta1 - 1.0) * pi / (p.r - p.mu1);
    return num / den * p.invest_cost;
}

double delta_strategy_payoff_h(const ClosedFormPack& pack, const State& s, double delta) {
    if (delta < 1.0) throw std::invalid_argument("delta must be >= 1");
    const auto& p = pack.params;
    const double d0 = std::pow(delta, -pack.beta0);
    const double d1 = std::pow(delta, -pack.beta1);
    return s.x * (delta * d0 * (1.0 - s.pi) / (p.r - p.mu0) + delta * d1 * s.pi / (p.r - p.mu1))
         - (d0 * (1.0 - s.pi) + d1 * s.pi) * p.invest_cost;
}

double delta_strategy_slope_at_one(const ClosedFormPack& pack, const State& s) {
    const auto& p = pack.params;
    return s.x * ((1.0 - pack.beta0) * (1.0 - s.pi) / (p.r - p.mu0)
                  + (1.0 - pack.beta1) * s.pi / (p.r - p.mu1))
         + (pack.beta0 * (1.0 - s.pi) + pack.beta1 * s.pi) * p.invest_cost;
}

double level_hit_discount(const ClosedFormPack& pack, double pi, double delta) {
    return (1.0 - pi) * std::pow(delta, -pack.beta0) + pi * std::pow(delta, -pack.beta1);
}

}  // namespace stopwell
