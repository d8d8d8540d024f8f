#include "stopwell/boundary.hpp"

#include "stopwell/sampling.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace stopwell {

BoundaryCurve::BoundaryCurve(std::vector<double> pi_grid, std::vector<double> values)
    : pi_(std::move(pi_grid)), values_(std::move(values)) {
    if (pi_.size() < 2 || pi_.size() != values_.size()) {
        throw std::invalid_argument("BoundaryCurve: need >= 2 nodes and matching sizes");
    }
    if (pi_.front() != 0.0 || pi_.back() != 1.0) throw std::invalid_argument("BoundaryCurve: grid must span [0,1]");
    for (std::size_t i = 1; i < pi_.size(); ++i) {
        if (!(pi_[i] > pi_[i - 1])) throw std::invalid_argument("BoundaryCurve: grid must be increasing");
    }
    const double h = 1.0 / static_cast<double>(pi_.size() - 1);
    uniform_ = true;
    for (std::size_t i = 0; i < pi_.size(); ++i) {
        if (std::abs(pi_[i] - static_cast<double>(i) * h) > 1e-12) {
            uniform_ = false;
            break;
        }
    }
}

BoundaryCurve BoundaryCurve::uniform(std::size_t m, const std::function<double(double)>& fn) {
    if (m < 2) throw std::invalid_argument("BoundaryCurve: need >= 2 nodes");
    std::vector<double> pi(m), v(m);
    for (std::size_t i = 0; i < m; ++i) {
        pi[i] = i + 1 == m ? 1.0 : static_cast<double>(i) / static_cast<double>(m - 1);
        v[i] = fn(pi[i]);
    }
    return BoundaryCurve(std::move(pi), std::move(v));
}

BoundaryCurve BoundaryCurve::lower_bound(const ClosedFormPack& pack, std::size_t m) {
    auto c = uniform(m, [&](double pi) { return lower_bound_b(pack, pi); });
    c.values().front() = pack.xstar0;
    c.values().back() = pack.xstar1;
    return c;
}

BoundaryCurve BoundaryCurve::constant(std::size_t m, double value) {
    return uniform(m, [value](double) { return value; });
}

double BoundaryCurve::operator()(double pi) const {
    if (pi <= 0.0) return values_.front();
    if (pi >= 1.0) return values_.back();
    std::size_t i;
    if (uniform_) {
        const double pos = pi * static_cast<double>(pi_.size() - 1);
        i = std::min(static_cast<std::size_t>(pos), pi_.size() - 2);
    } else {
        i = static_cast<std::size_t>(std::upper_bound(pi_.begin(), pi_.end(), pi) - pi_.begin()) - 1;
        i = std::min(i, pi_.size() - 2);
    }
    const double w = (pi - pi_[i]) / (pi_[i + 1] - pi_[i]);
    return values_[i] + w * (values_[i + 1] - values_[i]);
}

ClassCheck check_class(const ClosedFormPack& pack, const BoundaryCurve& curve, double tol) {
    ClassCheck c;
    const auto& v = curve.values();
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (i > 0 && v[i] > v[i - 1] + tol) c.non_increasing = false;
        if (v[i] < pack.xstar1 - tol || v[i] > pack.xstar0 + tol) c.in_range = false;
        if (v[i] < lower_bound_b(pack, curve.pi_grid()[i]) - tol) c.above_lower_bound = false;
    }
    if (std::abs(v.back() - pack.xstar1) > tol) c.pinned_at_one = false;
    return c;
}

std::vector<double> isotonic_decreasing(const std::vector<double>& y) {
    // Blocks of (mean, weight); merge while a later block exceeds an earlier one.
    std::vector<double> mean;
    std::vector<double> weight;
    for (double v : y) {
        mean.push_back(v);
        weight.push_back(1.0);
        while (mean.size() > 1 && mean[mean.size() - 1] > mean[mean.size() - 2]) {
            const double w = weight[weight.size() - 1] + weight[weight.size() - 2];
            const double m = (mean[mean.size() - 1] * weight[weight.size() - 1]
                              + mean[mean.size() - 2] * weight[weight.size() - 2]) / w;
            mean.pop_back();
            weight.pop_back();
            mean.back() = m;
            weight.back() = w;
        }
    }
    std::vector<double> out;
    out.reserve(y.size());
    for (std::size_t b = 0; b < mean.size(); ++b) {
        for (int k = 0; k < static_cast<int>(weight[b]); ++k) out.push_back(mean[b]);
    }
    return out;
}

BoundaryCurve project_to_class(const ClosedFormPack& pack, const BoundaryCurve& curve) {
    std::vector<double> v = curve.values();
    for (double& x : v) x = std::clamp(x, pack.xstar1, pack.xstar0);
    v.front() = pack.xstar0;
    v.back() = pack.xstar1;
    v = isotonic_decreasing(v);
    const auto& pi = curve.pi_grid();
    for (std::size_t i = 0; i < v.size(); ++i) {
        v[i] = std::clamp(std::max(v[i], lower_bound_b(pack, pi[i])), pack.xstar1, pack.xstar0);
    }
    v.front() = pack.xstar0;
    v.back() = pack.xstar1;
    return BoundaryCurve(pi, std::move(v));
}

McEstimate integral_residual(const ModelParams& params, const BoundaryCurve& curve, double pi,
                             std::uint64_t n_samples, const RngStream& stream, Exec exec) {
    const State start{curve(pi), pi};
    const double ri = params.r * params.invest_cost;
    return estimate_mean(
        n_samples, stream,
        [&](CounterRng& rng) {
            const SampleOne s = sample_at_exponential_time(params, start, rng);
            return s.x_xi <= curve(s.pi_xi) ? (s.x_xi - ri) / params.r : 0.0;
        },
        exec);
}

std::vector<PsiNode> psi_nodes(const ModelParams& params, const BoundaryCurve& curve, std::uint64_t n_samples,
                               const RngStream& stream, Exec exec) {
    const ClosedFormPack pack = make_pack(params);
    const double degenerate_se = 0.1 * (pack.xstar0 - pack.xstar1);
    std::vector<PsiNode> nodes;
    nodes.reserve(curve.size());
    for (std::size_t i = 0; i < curve.size(); ++i) {
        const double pi = curve.pi_grid()[i];
        const double scale = perpetuity_factor(params, pi);
        PsiNode node;
        node.residual = integral_residual(params, curve, pi, n_samples, node_stream(stream, i), exec);
        node.raw_update = curve.values()[i] - node.residual.mean / scale;
        node.update_se = node.residual.std_error / scale;
        if (node.update_se > degenerate_se) {
            throw EstimateDegenerateError("psi: update standard error " + std::to_string(node.update_se)
                                          + " at pi=" + std::to_string(pi) + " exceeds 10% of x0*-x1*");
        }
        nodes.push_back(node);
    }
    return nodes;
}

BoundaryCurve psi_apply(const ModelParams& params, const BoundaryCurve& curve, std::uint64_t n_samples,
                        const RngStream& stream, Exec exec) {
    const auto nodes = psi_nodes(params, curve, n_samples, stream, exec);
    std::vector<double> v(nodes.size());
    for (std::size_t i = 0; i < nodes.size(); ++i) v[i] = nodes[i].raw_update;
    return project_to_class(make_pack(params), BoundaryCurve(curve.pi_grid(), std::move(v)));
}

FixedPointResult fixed_point_solve(const ModelParams& params, const BoundaryCurve& init,
                                   const FixedPointOptions& opt, const RngStream& stream) {
    const ClosedFormPack pack = make_pack(params);
    if (opt.n_samples < 10'000) throw std::invalid_argument("fixed_point_solve: n_samples must be >= 1e4");

    FixedPointResult res;
    res.curve = project_to_class(pack, init);
    res.report.samples_per_node = opt.n_samples;
    res.report.tolerance = opt.tol;

    for (std::size_t it = 0; it < opt.max_iter; ++it) {
        res.last_nodes = psi_nodes(params, res.curve, opt.n_samples, stream, opt.exec);
        double max_res = 0.0;
        double max_se = 0.0;
        std::vector<double> v(res.last_nodes.size());
        for (std::size_t i = 0; i < v.size(); ++i) {
            v[i] = res.last_nodes[i].raw_update;
            max_res = std::max(max_res, std::abs(res.last_nodes[i].residual.mean));
            max_se = std::max(max_se, res.last_nodes[i].update_se);
        }
        if (opt.tol <= 0.0) res.report.tolerance = std::max(1e-5 * pack.xstar0, 0.5 * max_se);
        res.report.max_update_se = max_se;

        BoundaryCurve next = project_to_class(pack, BoundaryCurve(res.curve.pi_grid(), std::move(v)));
        double change = 0.0;
        for (std::size_t i = 0; i < next.size(); ++i) {
            change = std::max(change, std::abs(next.values()[i] - res.curve.values()[i]));
        }
        res.report.iterations = it + 1;
        res.report.sup_change_history.push_back(change);
        res.report.residual_history.push_back(max_res);
        if (change < res.report.tolerance) {
            res.report.converged = true;
            return res;
        }
        res.curve = std::move(next);
    }
    throw NonConvergenceError("fixed-point iteration did not converge in " + std::to_string(opt.max_iter)
                                  + " iterations",
                              res.report);
}

double lipschitz_bound(double pi, double pi_hat, double b0, double b1) {
    return (pi_hat - pi) * (b0 - b1) / (pi_hat * (1.0 - pi));
}

}  // namespace stopwell
