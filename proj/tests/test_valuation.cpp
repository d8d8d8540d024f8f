#include "stopwell/valuation.hpp"

#include <gtest/gtest.h>

#include <cmath>

using namespace stopwell;

TEST(Value, KnownDriftReproduced) {
    const ModelParams p;
    const auto pack = make_pack(p);
    for (int theta : {0, 1}) {
        const auto curve = BoundaryCurve::constant(11, pack.xstar(theta));
        const double pi = theta;
        const std::vector<double> xs{2.0, 5.0, 8.0, 12.0};
        const auto est = value_slice(p, curve, xs, pi, 200'000, RngStream{1, 1});
        for (std::size_t j = 0; j < xs.size(); ++j) {
            const double exact = known_drift_value(pack, theta, xs[j]);
            EXPECT_NEAR(est[j].mean, exact, 3.5 * est[j].std_error + 1e-9 * exact) << theta << " " << xs[j];
        }
    }
}

TEST(Value, SliceMatchesPointwiseEstimator) {
    const ModelParams p;
    const auto curve = BoundaryCurve::lower_bound(make_pack(p), 11);
    const std::vector<double> xs{4.0, 7.5};
    const auto slice = value_slice(p, curve, xs, 0.5, 20'000, RngStream{2, 2});
    for (std::size_t j = 0; j < xs.size(); ++j) {
        const auto one = value_from_boundary(p, curve, {xs[j], 0.5}, 20'000, RngStream{2, 2});
        EXPECT_NEAR(one.mean, slice[j].mean, 1e-9 * std::abs(one.mean));
    }
}

TEST(Value, DominatesPayoffAndMixtureBound) {
    const ModelParams p;
    const auto pack = make_pack(p);
    const auto curve = BoundaryCurve::lower_bound(pack, 11);
    const std::vector<double> xs{3.0, 6.0, 8.0, 9.0, 12.0};
    const auto vals = value_slice(p, curve, xs, 0.5, 100'000, RngStream{3, 3});
    for (std::size_t j = 0; j < xs.size(); ++j) {
        const State s{xs[j], 0.5};
        EXPECT_GE(vals[j].mean + 3 * vals[j].std_error, payoff_g(p, s));
        EXPECT_LE(vals[j].mean - 3 * vals[j].std_error, full_info_value(pack, s));
    }
}

TEST(Voi, ZeroBeyondTopOfBoundaryAndNonNegative) {
    const ModelParams p;
    const auto pack = make_pack(p);
    const auto curve = BoundaryCurve::lower_bound(pack, 21);
    const std::vector<double> xs{2.0, 7.0, 8.0, 9.0, 11.0};
    const std::vector<double> pis{0.3, 0.7};
    const auto s = value_of_information(p, curve, xs, pis, 50'000, RngStream{4, 4});
    ASSERT_EQ(s.delta.size(), xs.size() * pis.size());
    for (std::size_t i = 0; i < pis.size(); ++i) {
        for (std::size_t j = 0; j < xs.size(); ++j) {
            const auto k = s.index(i, j);
            EXPECT_GE(s.delta[k], -3 * s.delta_se[k]);
            EXPECT_NEAR(s.delta[k], s.v_bar[k] - s.v[k], 1e-12 * std::max(1.0, s.v[k]));
            if (xs[j] >= curve(0.0)) EXPECT_NEAR(s.delta[k], 0.0, 3 * s.delta_se[k] + 1e-9);
        }
    }
    EXPECT_EQ(s.argmax_x.size(), pis.size());
}

TEST(Strategy, PathPayoffAgreesWithRepresentation) {
    const ModelParams p;
    const auto pack = make_pack(p);
    const auto curve = BoundaryCurve::constant(11, pack.xstar1);
    const State s{5.0, 1.0};
    const double dt = 0.01;
    const auto pay = strategy_payoff(p, s, CurveRule{&curve}, dt, default_horizon(p), 20'000, RngStream{5, 5});
    const double exact = known_drift_value(pack, 1, 5.0);
    EXPECT_FALSE(pay.truncation_warning);
    // Discrete monitoring stops late, which costs a little value.
    const double allow = 0.05 * exact;
    EXPECT_LE(pay.payoff.mean, exact + 3 * pay.payoff.std_error);
    EXPECT_GE(pay.payoff.mean, exact - allow - 3 * pay.payoff.std_error);
}

TEST(Strategy, SuboptimalRuleBelowValue) {
    const ModelParams p;
    const auto pack = make_pack(p);
    const State s{6.0, 1.0};
    const auto pay = strategy_payoff(p, s, LevelRatioRule{2.0}, 0.02, default_horizon(p), 20'000, RngStream{6, 6});
    EXPECT_LE(pay.payoff.mean, known_drift_value(pack, 1, 6.0) + 3 * pay.payoff.std_error);
    EXPECT_THROW(strategy_payoff(p, s, LevelRatioRule{2.0}, 0.0, 10.0, 10, RngStream{}), std::invalid_argument);
}
