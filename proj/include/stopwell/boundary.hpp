// Candidate boundary curves and the Monte-Carlo fixed-point iteration for the
// investment boundary b(pi).
//
// For a curve a and belief pi, the integral-equation residual is
//
//   F_a(pi) = E[ (1/r) (X_xi - rI) 1{X_xi <= a(Pi_xi)} ],  started at (a(pi), pi),
//
// with xi ~ Exp(r) independent of everything. The boundary is the unique curve
// in the admissible class with F = 0 everywhere; the update
//
//   Psi a(pi) = a(pi) - F_a(pi) / perpetuity_factor(pi)
//
// is iterated from the analytic lower bound. Each node keeps its own random
// stream across iterations, so the sampled map is deterministic and the stopping
// rule sees contraction rather than resampling noise.
#pragma once

#include "stopwell/closed_form.hpp"
#include "stopwell/mc.hpp"
#include "stopwell/model.hpp"
#include "stopwell/rng.hpp"

#include <cstdint>
#include <functional>
#include <stdexcept>
#include <vector>

namespace stopwell {

/// Piecewise-linear pi -> threshold map on an increasing grid from 0 to 1.
class BoundaryCurve {
public:
    BoundaryCurve() = default;
    BoundaryCurve(std::vector<double> pi_grid, std::vector<double> values);

    /// Uniform grid of m >= 2 nodes filled from fn(pi).
    static BoundaryCurve uniform(std::size_t m, const std::function<double(double)>& fn);
    static BoundaryCurve lower_bound(const ClosedFormPack& pack, std::size_t m);
    static BoundaryCurve constant(std::size_t m, double value);

    double operator()(double pi) const;

    std::size_t size() const { return pi_.size(); }
    const std::vector<double>& pi_grid() const { return pi_; }
    const std::vector<double>& values() const { return values_; }
    std::vector<double>& values() { return values_; }

private:
    std::vector<double> pi_;
    std::vector<double> values_;
    bool uniform_ = false;
};

struct ClassCheck {
    bool non_increasing = true;
    bool in_range = true;
    bool pinned_at_one = true;
    bool above_lower_bound = true;

    bool ok() const { return non_increasing && in_range && pinned_at_one && above_lower_bound; }
};

/// Membership test for the admissible class (continuous, non-increasing,
/// values in [x1*, x0*], a(1) = x1*, a >= lower bound), each up to tol.
ClassCheck check_class(const ClosedFormPack& pack, const BoundaryCurve& curve, double tol);

/// Non-increasing least-squares fit by pool-adjacent-violators.
std::vector<double> isotonic_decreasing(const std::vector<double>& y);

/// Clamp to [x1*, x0*], pin a(0) = x0* and a(1) = x1*, isotonic projection,
/// then pointwise max with the lower bound.
BoundaryCurve project_to_class(const ClosedFormPack& pack, const BoundaryCurve& curve);

class EstimateDegenerateError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// F_curve(pi) with its standard error.
McEstimate integral_residual(const ModelParams& params, const BoundaryCurve& curve, double pi,
                             std::uint64_t n_samples, const RngStream& stream, Exec exec = Exec::parallel);

struct PsiNode {
    McEstimate residual;  // F at this node
    double raw_update;    // a(pi) - F / perpetuity_factor(pi), before projection
    double update_se;     // residual.std_error / perpetuity_factor(pi)
};

/// The stream node i of a solver run draws from.
inline RngStream node_stream(const RngStream& base, std::size_t node) { return base.child(node); }

/// Raw Psi at every node (no projection). Throws EstimateDegenerateError when a
/// node's update standard error exceeds 10% of x0* - x1*.
std::vector<PsiNode> psi_nodes(const ModelParams& params, const BoundaryCurve& curve, std::uint64_t n_samples,
                               const RngStream& stream, Exec exec = Exec::parallel);

/// Psi followed by projection into the admissible class.
BoundaryCurve psi_apply(const ModelParams& params, const BoundaryCurve& curve, std::uint64_t n_samples,
                        const RngStream& stream, Exec exec = Exec::parallel);

struct IterationReport {
    std::size_t iterations = 0;
    std::vector<double> sup_change_history;
    std::vector<double> residual_history;  // max |F| over nodes at each iterate
    std::uint64_t samples_per_node = 0;
    double tolerance = 0.0;
    double max_update_se = 0.0;
    bool converged = false;
};

struct FixedPointOptions {
    /// Sup-norm stopping tolerance; <= 0 selects max(1e-5 x0*, 0.5 * max node update SE)
    /// of the current iterate. The residual at a node is G(pi) times its unprojected
    /// change, so this keeps every unclamped residual below half a standard error.
    double tol = 0.0;
    std::size_t max_iter = 200;
    std::uint64_t n_samples = 1'000'000;
    Exec exec = Exec::parallel;
};

struct FixedPointResult {
    BoundaryCurve curve;              // last evaluated iterate
    IterationReport report;
    std::vector<PsiNode> last_nodes;  // residuals of `curve`
};

class NonConvergenceError : public std::runtime_error {
public:
    NonConvergenceError(const std::string& what, IterationReport report)
        : std::runtime_error(what), report_(std::move(report)) {}
    const IterationReport& report() const { return report_; }

private:
    IterationReport report_;
};

FixedPointResult fixed_point_solve(const ModelParams& params, const BoundaryCurve& init,
                                   const FixedPointOptions& options, const RngStream& stream);

/// Upper bound on b(pi) - b(pi_hat) for pi < pi_hat in (0,1), given the
/// endpoint values: (pi_hat - pi) (b(0) - b(1)) / (pi_hat (1 - pi)).
double lipschitz_bound(double pi, double pi_hat, double b0, double b1);

}  // namespace stopwell
