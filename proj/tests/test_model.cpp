#include "stopwell/model.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <limits>

using namespace stopwell;

namespace {

ValidationFailure failure_of(const ModelParams& p) {
    try {
        validate(p);
    } catch (const ValidationError& e) {
        return e.failure();
    }
    ADD_FAILURE() << "expected a validation error";
    return ValidationFailure::non_finite;
}

}  // namespace

TEST(Model, ReferenceParamsAreValid) { EXPECT_EQ(validate(kReferenceParams), kReferenceParams); }

TEST(Model, RejectsEachConstraint) {
    ModelParams p;
    p.sigma = 0.0;
    EXPECT_EQ(failure_of(p), ValidationFailure::non_positive_sigma);
    p = {};
    p.mu0 = p.mu1;
    EXPECT_EQ(failure_of(p), ValidationFailure::drift_ordering);
    p = {};
    p.r = p.mu1;
    EXPECT_EQ(failure_of(p), ValidationFailure::discount_too_small);
    p = {};
    p.mu0 = -0.2;
    p.mu1 = -0.1;
    p.r = 0.0;
    EXPECT_EQ(failure_of(p), ValidationFailure::discount_too_small);
    p = {};
    p.invest_cost = -1.0;
    EXPECT_EQ(failure_of(p), ValidationFailure::non_positive_cost);
    p = {};
    p.sigma = std::numeric_limits<double>::quiet_NaN();
    EXPECT_EQ(failure_of(p), ValidationFailure::non_finite);
}

TEST(Model, NegativeDriftsAllowed) {
    ModelParams p;
    p.mu0 = -0.05;
    p.mu1 = -0.01;
    p.r = 0.01;
    EXPECT_NO_THROW(validate(p));
}

TEST(Model, StateValidation) {
    EXPECT_NO_THROW(validate_state({1.0, 0.0}));
    EXPECT_NO_THROW(validate_state({1.0, 1.0}));
    EXPECT_THROW(validate_state({0.0, 0.5}), ValidationError);
    EXPECT_THROW(validate_state({1.0, 1.5}), ValidationError);
    EXPECT_THROW(validate_state({1.0, std::nan("")}), ValidationError);
}

TEST(Model, PayoffIsLinearMixtureOfKnownDriftPayoffs) {
    const ModelParams p;
    for (double x : {0.5, 5.0, 50.0}) {
        const double g0 = x / (p.r - p.mu0) - p.invest_cost;
        const double g1 = x / (p.r - p.mu1) - p.invest_cost;
        for (double pi : {0.0, 0.3, 1.0}) {
            EXPECT_NEAR(payoff_g(p, {x, pi}), (1 - pi) * g0 + pi * g1, 1e-12 * std::abs(g1));
        }
        EXPECT_NEAR(payoff_g_dpi(p, x), g1 - g0, 1e-12 * x);
    }
    EXPECT_DOUBLE_EQ(payoff_g(p, {5.0, 1.0}), 150.0);
    EXPECT_DOUBLE_EQ(signal_to_noise(p), 0.1);
}

TEST(Model, FailureNames) {
    EXPECT_FALSE(to_string(ValidationFailure::drift_ordering).empty());
    EXPECT_NE(to_string(ValidationFailure::drift_ordering), to_string(ValidationFailure::non_finite));
}
