// Value function estimates, stopping-strategy payoffs and the value of
// information.
#pragma once

#include "stopwell/boundary.hpp"
#include "stopwell/closed_form.hpp"
#include "stopwell/mc.hpp"
#include "stopwell/model.hpp"

#include <cstdint>
#include <span>
#include <variant>
#include <vector>

namespace stopwell {

/// V(x, pi) from a boundary via exponential randomization. Evaluated as
///   g(x, pi) - (1/r) E[(X_xi - rI) 1{X_xi < curve(Pi_xi)}],
/// which equals (1/r) E[(X_xi - rI) 1{X_xi >= curve(Pi_xi)}] because
/// (1/r) E[X_xi - rI] = g(x, pi) exactly; the complement has a bounded
/// integrand, while X_xi itself has infinite variance whenever r < 2 mu + sigma^2.
McEstimate value_from_boundary(const ModelParams& params, const BoundaryCurve& curve, const State& s,
                               std::uint64_t n_samples, const RngStream& stream, Exec exec = Exec::parallel);

/// value_from_boundary at every x of a slice, with common random numbers across x.
std::vector<McEstimate> value_slice(const ModelParams& params, const BoundaryCurve& curve,
                                    std::span<const double> xs, double pi, std::uint64_t n_samples,
                                    const RngStream& stream, Exec exec = Exec::parallel);

/// (1 - pi) V(x, 0) + pi V(x, 1), closed form.
double full_info_value(const ClosedFormPack& pack, const State& s);

struct VoiSurface {
    std::vector<double> x_grid;
    std::vector<double> pi_grid;
    // Row-major [pi index][x index].
    std::vector<double> v_bar;
    std::vector<double> v;
    std::vector<double> v_se;
    std::vector<double> delta;
    std::vector<double> delta_se;
    std::vector<double> argmax_x;  // per pi

    std::size_t index(std::size_t pi_idx, std::size_t x_idx) const { return pi_idx * x_grid.size() + x_idx; }
};

/// Delta(x, pi) = V_bar - V on a grid. Each pi row uses one stream (common
/// random numbers across x), so Delta(., pi) is a smooth sampled curve.
VoiSurface value_of_information(const ModelParams& params, const BoundaryCurve& curve,
                                std::span<const double> x_grid, std::span<const double> pi_list,
                                std::uint64_t n_samples, const RngStream& stream, Exec exec = Exec::parallel);

/// Invest at the first monitored time with X_t >= curve(Pi_t).
struct CurveRule {
    const BoundaryCurve* curve;
};

/// Invest at the first monitored time with X_t >= ratio * x0.
struct LevelRatioRule {
    double ratio;
};

using StoppingRule = std::variant<CurveRule, LevelRatioRule>;

struct StrategyPayoff {
    McEstimate payoff;    // E[exp(-r tau) g(X_tau, Pi_tau)]
    McEstimate discount;  // E[exp(-r tau)]
    double truncation_bound;
    bool truncation_warning;  // truncation_bound > 1e-3
};

/// Path-simulated payoff of a feasible stopping rule; unstopped paths pay 0.
/// Independent of the integral representation behind value_from_boundary.
StrategyPayoff strategy_payoff(const ModelParams& params, const State& s, const StoppingRule& rule, double dt,
                               double horizon, std::uint64_t n_samples, const RngStream& stream,
                               Exec exec = Exec::parallel);

/// 10 / (r - mu1); its discounted tail is below exp(-rT) x / (r - mu1).
double default_horizon(const ModelParams& params);

}  // namespace stopwell
