#include "stopwell/boundary.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <random>

using namespace stopwell;

namespace {

// The decreasing least-squares fit must beat any other decreasing candidate.
double sq_dist(const std::vector<double>& a, const std::vector<double>& b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += (a[i] - b[i]) * (a[i] - b[i]);
    return s;
}

}  // namespace

TEST(Curve, InterpolationAndValidation) {
    const BoundaryCurve c({0.0, 0.5, 1.0}, {10.0, 8.0, 7.0});
    EXPECT_DOUBLE_EQ(c(0.25), 9.0);
    EXPECT_DOUBLE_EQ(c(0.75), 7.5);
    EXPECT_DOUBLE_EQ(c(1.0), 7.0);
    EXPECT_DOUBLE_EQ(c(-0.1), 10.0);
    const auto u = BoundaryCurve::uniform(5, [](double pi) { return 1.0 - pi; });
    EXPECT_DOUBLE_EQ(u(0.3), 0.7);
    EXPECT_THROW(BoundaryCurve({0.0, 0.4}, {1.0, 2.0}), std::invalid_argument);
    EXPECT_THROW(BoundaryCurve({0.0, 0.6, 0.5, 1.0}, {1, 1, 1, 1}), std::invalid_argument);
    EXPECT_THROW(BoundaryCurve::constant(1, 3.0), std::invalid_argument);
}

TEST(Isotonic, DecreasingAndOptimal) {
    std::mt19937_64 gen(3);
    std::normal_distribution<double> n(0.0, 1.0);
    for (int rep = 0; rep < 200; ++rep) {
        std::vector<double> y(12);
        for (std::size_t i = 0; i < y.size(); ++i) y[i] = -0.3 * static_cast<double>(i) + n(gen);
        const auto fit = isotonic_decreasing(y);
        for (std::size_t i = 1; i < fit.size(); ++i) ASSERT_LE(fit[i], fit[i - 1] + 1e-12);
        // Mean is preserved and no decreasing candidate is closer.
        double sy = 0.0, sf = 0.0;
        for (std::size_t i = 0; i < y.size(); ++i) sy += y[i], sf += fit[i];
        EXPECT_NEAR(sy, sf, 1e-9);
        const double best = sq_dist(fit, y);
        for (int k = 0; k < 50; ++k) {
            std::vector<double> cand(y.size());
            double v = 5.0;
            for (auto& c : cand) c = (v -= std::abs(n(gen)) * 0.5);
            ASSERT_GE(sq_dist(cand, y), best - 1e-9);
        }
    }
    const std::vector<double> already{5, 4, 4, 1};
    EXPECT_EQ(isotonic_decreasing(already), already);
}

TEST(Projection, LandsInClass) {
    const auto pack = make_pack(kReferenceParams);
    std::mt19937_64 gen(4);
    std::uniform_real_distribution<double> u(5.0, 11.0);
    for (int rep = 0; rep < 100; ++rep) {
        std::vector<double> v(21);
        for (auto& x : v) x = u(gen);
        const auto raw = BoundaryCurve::uniform(21, [](double) { return 0.0; });
        const BoundaryCurve c(raw.pi_grid(), v);
        const auto proj = project_to_class(pack, c);
        EXPECT_TRUE(check_class(pack, proj, 1e-12).ok());
        EXPECT_NEAR(proj.values().front(), pack.xstar0, 1e-12);
        EXPECT_NEAR(proj.values().back(), pack.xstar1, 1e-12);
        // Idempotent.
        EXPECT_EQ(project_to_class(pack, proj).values(), proj.values());
    }
    EXPECT_TRUE(check_class(pack, BoundaryCurve::lower_bound(pack, 11), 1e-12).ok());
    EXPECT_FALSE(check_class(pack, BoundaryCurve::constant(11, pack.xstar0), 1e-9).pinned_at_one);
}

TEST(Residual, PsiIsFixedAtKnownDriftEnds) {
    // At pi = 1 and pi = 0 the belief never moves, so the residual at the
    // known-drift threshold vanishes in expectation.
    const ModelParams p;
    const auto pack = make_pack(p);
    const auto curve = BoundaryCurve::lower_bound(pack, 11);
    for (double pi : {0.0, 1.0}) {
        const auto e = integral_residual(p, curve, pi, 200'000, RngStream{1, 2});
        EXPECT_NEAR(e.mean, 0.0, 4 * e.std_error);
    }
}

TEST(Residual, SerialParallelAgree) {
    const ModelParams p;
    const auto curve = BoundaryCurve::lower_bound(make_pack(p), 11);
    const auto a = integral_residual(p, curve, 0.4, 20'000, RngStream{3, 3}, Exec::serial);
    const auto b = integral_residual(p, curve, 0.4, 20'000, RngStream{3, 3}, Exec::parallel);
    EXPECT_NEAR(a.mean, b.mean, 1e-10 * std::max(1.0, std::abs(a.mean)));
}

TEST(FixedPoint, ConvergesIntoClassWithSmallResiduals) {
    const ModelParams p;
    const auto pack = make_pack(p);
    FixedPointOptions o;
    o.n_samples = 50'000;
    const auto fp = fixed_point_solve(p, BoundaryCurve::constant(11, pack.xstar0), o, RngStream{5, 1});
    EXPECT_TRUE(fp.report.converged);
    EXPECT_TRUE(check_class(pack, fp.curve, 1e-9).ok());
    ASSERT_EQ(fp.last_nodes.size(), 11u);
    for (const auto& n : fp.last_nodes) EXPECT_LT(std::abs(n.residual.mean), 4 * n.residual.std_error + 1e-9);
    EXPECT_EQ(fp.report.samples_per_node, 50'000u);
    EXPECT_EQ(fp.report.sup_change_history.size(), fp.report.iterations);
}

TEST(FixedPoint, Deterministic) {
    const ModelParams p;
    FixedPointOptions o;
    o.n_samples = 10'000;
    const auto init = BoundaryCurve::lower_bound(make_pack(p), 6);
    const auto a = fixed_point_solve(p, init, o, RngStream{6, 1});
    const auto b = fixed_point_solve(p, init, o, RngStream{6, 1});
    EXPECT_EQ(a.curve.values(), b.curve.values());
}

TEST(FixedPoint, ErrorsOnBadOptions) {
    const ModelParams p;
    const auto init = BoundaryCurve::lower_bound(make_pack(p), 6);
    FixedPointOptions o;
    o.n_samples = 100;
    EXPECT_THROW(fixed_point_solve(p, init, o, RngStream{}), std::invalid_argument);
    o.n_samples = 10'000;
    o.tol = 1e-300;
    o.max_iter = 1;
    EXPECT_THROW(fixed_point_solve(p, BoundaryCurve::constant(6, make_pack(p).xstar0), o, RngStream{}),
                 NonConvergenceError);
}

TEST(Lipschitz, BoundFormula) {
    EXPECT_DOUBLE_EQ(lipschitz_bound(0.2, 0.4, 9.0, 7.0), 0.2 * 2.0 / (0.4 * 0.8));
    EXPECT_DOUBLE_EQ(lipschitz_bound(0.3, 0.3, 9.0, 7.0), 0.0);
}
