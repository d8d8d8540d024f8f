#include "stopwell/belief_filter.hpp"
#include "stopwell/closed_form.hpp"
#include "stopwell/sampling.hpp"

#include <gtest/gtest.h>

#include <cmath>

using namespace stopwell;

TEST(Sampling, ExponentialTimeSampleConsistent) {
    const ModelParams p;
    for (std::uint64_t i = 0; i < 100; ++i) {
        const auto a = sample_at_exponential_time(p, {5.0, 0.3}, RngStream{1, 1}, i);
        EXPECT_GT(a.xi, 0.0);
        EXPECT_NEAR(a.x_xi, 5.0 * std::exp(a.log_growth), 1e-12 * a.x_xi);
        EXPECT_NEAR(a.pi_xi, posterior_f(p, {a.xi, 5.0, 0.3, a.x_xi}), 1e-12);
    }
}

TEST(Sampling, CommonRandomNumbersAcrossStates) {
    const ModelParams p;
    const auto a = sample_at_exponential_time(p, {5.0, 0.4}, RngStream{2, 3}, 17);
    const auto b = sample_at_exponential_time(p, {9.0, 0.4}, RngStream{2, 3}, 17);
    EXPECT_EQ(a.theta, b.theta);
    EXPECT_EQ(a.xi, b.xi);
    EXPECT_NEAR(a.log_growth, b.log_growth, 1e-15);
    EXPECT_NEAR(b.x_xi / a.x_xi, 9.0 / 5.0, 1e-12);
}

TEST(Sampling, ConditionalMeanAtExponentialTime) {
    // A set where X at an exponential time has finite variance: r > 2 mu + sigma^2.
    ModelParams p;
    p.r = 0.1;
    p.sigma = 0.15;
    for (int theta : {0, 1}) {
        const auto e = estimate_mean(200'000, RngStream{5, 5}, [&](CounterRng& rng) {
            return sample_at_exponential_time(p, {2.0, static_cast<double>(theta)}, rng).x_xi;
        });
        EXPECT_NEAR(e.mean, 2.0 * p.r / (p.r - drift(p, theta)), 4 * e.std_error);
    }
}

TEST(Sampling, PathMatchesStepperAndGrid) {
    const ModelParams p;
    const auto path = simulate_path(p, {3.0, 0.5}, 1.0, 0.1, RngStream{6, 6}, 4);
    ASSERT_EQ(path.times.size(), 11u);
    EXPECT_EQ(path.x_path.front(), 3.0);
    EXPECT_NEAR(path.times.back(), 1.0, 1e-12);
    CounterRng rng(RngStream{6, 6}, 4);
    GbmStepper st(p, {3.0, 0.5}, 0.1, rng);
    EXPECT_EQ(st.theta(), path.theta);
    for (std::size_t i = 1; i < path.times.size(); ++i) {
        st.step();
        EXPECT_NEAR(st.x(), path.x_path[i], 1e-12 * path.x_path[i]);
    }
    EXPECT_THROW(simulate_path(p, {3.0, 0.5}, 1.0, 0.0, RngStream{}), std::invalid_argument);
}

TEST(Sampling, FirstPassageWithinAllowance) {
    const ModelParams p;
    const auto pack = make_pack(p);
    const double delta = 1.5;
    const double dt = 0.04;
    for (int theta : {0, 1}) {
        const auto r = first_passage_discounted(p, {1.0, double(theta)}, delta, dt, 400.0, 20'000, RngStream{7, 7});
        const double exact = std::pow(delta, -pack.beta(theta));
        const double allow = discrete_monitoring_allowance(pack, theta, delta, dt);
        EXPECT_FALSE(r.truncation_warning);
        EXPECT_LE(r.estimate.mean, exact + 3 * r.estimate.std_error);
        EXPECT_GE(r.estimate.mean, exact - allow - 3 * r.estimate.std_error);
    }
}

TEST(Sampling, LadderMatchesSingleStrideRuns) {
    const ModelParams p;
    const State s{1.0, 0.5};
    const auto ladder = first_passage_ladder(p, s, 1.3, 0.05, 200.0, 4000, RngStream{8, 1}, {1, 4});
    const auto one = first_passage_discounted(p, s, 1.3, 0.05, 200.0, 4000, RngStream{8, 1}, 1);
    const auto four = first_passage_discounted(p, s, 1.3, 0.05, 200.0, 4000, RngStream{8, 1}, 4);
    EXPECT_EQ(ladder[0].estimate.mean, one.estimate.mean);
    EXPECT_EQ(ladder[1].estimate.mean, four.estimate.mean);
    // Sparser monitoring on the same paths can only hit later.
    EXPECT_LE(ladder[1].estimate.mean, ladder[0].estimate.mean);
    EXPECT_THROW(first_passage_ladder(p, s, 1.3, 0.05, 200.0, 10, RngStream{}, {2, 3}), std::invalid_argument);
    EXPECT_THROW(first_passage_discounted(p, s, 0.9, 0.05, 200.0, 10, RngStream{}), std::invalid_argument);
}

TEST(Sampling, SerialAndParallelFirstPassageAgree) {
    const ModelParams p;
    const auto a = first_passage_discounted(p, {1.0, 0.5}, 1.5, 0.05, 100.0, 5000, RngStream{9, 9}, 1, Exec::serial);
    const auto b = first_passage_discounted(p, {1.0, 0.5}, 1.5, 0.05, 100.0, 5000, RngStream{9, 9}, 1, Exec::parallel);
    EXPECT_NEAR(a.estimate.mean, b.estimate.mean, 1e-12);
}

TEST(Sampling, AllowanceShrinksWithDt) {
    const auto pack = make_pack(kReferenceParams);
    const double a = discrete_monitoring_allowance(pack, 0.5, 2.0, 0.04);
    const double b = discrete_monitoring_allowance(pack, 0.5, 2.0, 0.01);
    EXPECT_GT(a, b);
    EXPECT_GT(b, 0.0);
    EXPECT_NEAR(a / b, 2.0, 0.1);
}
