#include "stopwell/valuation.hpp"

#include "stopwell/sampling.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace stopwell {

McEstimate value_from_boundary(const ModelParams& params, const BoundaryCurve& curve, const State& s,
                               std::uint64_t n_samples, const RngStream& stream, Exec exec) {
    validate_state(s);
    const double ri = params.r * params.invest_cost;
    McEstimate below = estimate_mean(
        n_samples, stream,
        [&](CounterRng& rng) {
            const SampleOne smp = sample_at_exponential_time(params, s, rng);
            return smp.x_xi < curve(smp.pi_xi) ? (smp.x_xi - ri) / params.r : 0.0;
        },
        exec);
    below.mean = payoff_g(params, s) - below.mean;
    return below;
}

std::vector<McEstimate> value_slice(const ModelParams& params, const BoundaryCurve& curve,
                                    std::span<const double> xs, double pi, std::uint64_t n_samples,
                                    const RngStream& stream, Exec exec) {
    for (double x : xs) validate_state({x, pi});
    const double ri = params.r * params.invest_cost;
    // Pi_xi and X_xi / x do not depend on the starting level, so one draw at
    // x = 1 serves every x of the slice.
    auto est = estimate_means(
        n_samples, xs.size(), stream,
        [&](CounterRng& rng, std::span<double> out) {
            const SampleOne smp = sample_at_exponential_time(params, {1.0, pi}, rng);
            const double level = curve(smp.pi_xi);
            const double growth = smp.x_xi;
            for (std::size_t j = 0; j < xs.size(); ++j) {
                const double x = xs[j] * growth;
                out[j] = x < level ? (x - ri) / params.r : 0.0;
            }
        },
        exec);
    for (std::size_t j = 0; j < xs.size(); ++j) est[j].mean = payoff_g(params, {xs[j], pi}) - est[j].mean;
    return est;
}

double full_info_value(const ClosedFormPack& pack, const State& s) {
    return (1.0 - s.pi) * known_drift_value(pack, 0, s.x) + s.pi * known_drift_value(pack, 1, s.x);
}

VoiSurface value_of_information(const ModelParams& params, const BoundaryCurve& curve,
                                std::span<const double> x_grid, std::span<const double> pi_list,
                                std::uint64_t n_samples, const RngStream& stream, Exec exec) {
    const ClosedFormPack pack = make_pack(params);
    VoiSurface out;
    out.x_grid.assign(x_grid.begin(), x_grid.end());
    out.pi_grid.assign(pi_list.begin(), pi_list.end());
    const std::size_t n = x_grid.size() * pi_list.size();
    out.v_bar.resize(n);
    out.v.resize(n);
    out.v_se.resize(n);
    out.delta.resize(n);
    out.delta_se.resize(n);
    out.argmax_x.resize(pi_list.size());

    for (std::size_t p = 0; p < pi_list.size(); ++p) {
        const auto slice = value_slice(params, curve, x_grid, pi_list[p], n_samples, stream.child(p), exec);
        double best = -INFINITY;
        for (std::size_t j = 0; j < x_grid.size(); ++j) {
            const std::size_t k = out.index(p, j);
            out.v_bar[k] = full_info_value(pack, {x_grid[j], pi_list[p]});
            out.v[k] = slice[j].mean;
            out.v_se[k] = slice[j].std_error;
            out.delta[k] = out.v_bar[k] - out.v[k];
            out.delta_se[k] = slice[j].std_error;
            if (out.delta[k] > best) {
                best = out.delta[k];
                out.argmax_x[p] = x_grid[j];
            }
        }
    }
    return out;
}

double default_horizon(const ModelParams& params) { return 10.0 / (params.r - params.mu1); }

StrategyPayoff strategy_payoff(const ModelParams& params, const State& s, const StoppingRule& rule, double dt,
                               double horizon, std::uint64_t n_samples, const RngStream& stream, Exec exec) {
    validate_state(s);
    if (!(dt > 0.0) || !(horizon >= dt)) throw std::invalid_argument("strategy_payoff: need dt > 0, horizon >= dt");
    const ClosedFormPack pack = make_pack(params);
    const auto max_steps = static_cast<std::uint64_t>(std::floor(horizon / dt + 1e-9));

    double x_lo = 0.0;
    double x_hi = 0.0;
    if (const auto* c = std::get_if<CurveRule>(&rule)) {
        const auto& v = c->curve->values();
        x_lo = *std::min_element(v.begin(), v.end());
        x_hi = *std::max_element(v.begin(), v.end());
    } else {
        x_lo = x_hi = std::get<LevelRatioRule>(rule).ratio * s.x;
    }
    const double beta_lo = std::min(pack.beta0, pack.beta1);
    // Payoff at a stop is at most g(level * overshoot, 1); six standard
    // deviations of one step cover the overshoot.
    const double payoff_hi = std::max(
        1.0, payoff_g(params, {std::max(x_hi, s.x) * std::exp(6.0 * params.sigma * std::sqrt(dt)), 1.0}));
    const double cutoff = kPathCutoff * params.invest_cost;

    auto should_stop = [&](double x, double belief, double log_growth) {
        if (const auto* c = std::get_if<CurveRule>(&rule)) return x >= (*c->curve)(belief);
        return log_growth >= std::log(std::get<LevelRatioRule>(rule).ratio);
    };

    auto path = [&](CounterRng& rng, std::span<double> out) {
        GbmStepper stepper(params, s, dt, rng);
        out[0] = 0.0;
        out[1] = 0.0;
        if (should_stop(s.x, s.pi, 0.0)) {
            out[0] = payoff_g(params, s);
            out[1] = 1.0;
            return;
        }
        for (std::uint64_t k = 1; k <= max_steps; ++k) {
            stepper.step();
            const double x = stepper.x();
            const double belief = stepper.belief();
            if (should_stop(x, belief, stepper.log_growth())) {
                const double disc = std::exp(-params.r * stepper.time());
                out[0] = disc * payoff_g(params, {x, belief});
                out[1] = disc;
                return;
            }
            if (k % 64 == 0 && x < x_lo) {
                const double bound = std::exp(-params.r * stepper.time()) * std::pow(x / x_lo, beta_lo) * payoff_hi;
                if (bound < cutoff) return;
            }
        }
    };

    auto est = estimate_means(n_samples, 2, stream, path, exec);
    StrategyPayoff res;
    res.payoff = est[0];
    res.discount = est[1];
    res.truncation_bound = std::exp(-params.r * static_cast<double>(max_steps) * dt) * std::max(s.x, x_hi)
                               / (params.r - params.mu1)
                         + cutoff;
    res.truncation_warning = res.truncation_bound > 1e-3;
    return res;
}

}  // namespace stopwell
