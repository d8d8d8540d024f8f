#include "stopwell/belief_filter.hpp"
#include "stopwell/rng.hpp"
#include "stopwell/sampling.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <random>

using namespace stopwell;

TEST(Filter, MatchesBayesOracle) {
    std::mt19937_64 gen(1);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    const ModelParams p;
    for (int n = 0; n < 10'000; ++n) {
        const FilterInput in{0.01 + 50 * u(gen), 0.1 + 20 * u(gen), u(gen), 0.1 + 40 * u(gen)};
        const double f = posterior_f(p, in);
        const double o = bayes_oracle(p, in);
        ASSERT_NEAR(f, o, 1e-12 * std::max(o, 1e-300)) << n;
    }
}

TEST(Filter, AbsorbingPriors) {
    const ModelParams p;
    EXPECT_EQ(posterior_f(p, {3.0, 1.0, 0.0, 100.0}), 0.0);
    EXPECT_EQ(posterior_f(p, {3.0, 1.0, 1.0, 1e-3}), 1.0);
    EXPECT_EQ(posterior_f(p, {0.0, 1.0, 0.3, 1.0}), 0.3);
}

TEST(Filter, MonotoneInObservation) {
    const ModelParams p;
    double prev = 0.0;
    for (double y = 0.2; y < 30.0; y *= 1.3) {
        const double f = posterior_f(p, {5.0, 1.0, 0.5, y});
        EXPECT_GE(f, prev);
        prev = f;
    }
}

TEST(Filter, LogitLinearInLogGrowth) {
    const ModelParams p;
    auto logit = [](double q) { return std::log(q / (1 - q)); };
    const double k = (p.mu1 - p.mu0) / (p.sigma * p.sigma);
    const double a = logit(posterior_f(p, {2.0, 1.0, 0.4, 1.5}));
    const double b = logit(posterior_f(p, {2.0, 1.0, 0.4, 3.0}));
    EXPECT_NEAR(b - a, k * std::log(2.0), 1e-12);
}

TEST(Filter, PosteriorIsMartingaleAtExponentialTime) {
    const ModelParams p;
    const RngStream s{4, 4};
    for (double pi : {0.2, 0.7}) {
        const auto e = estimate_mean(200'000, s, [&](CounterRng& rng) {
            return sample_at_exponential_time(p, {5.0, pi}, rng).pi_xi;
        });
        EXPECT_NEAR(e.mean, pi, 4 * e.std_error);
    }
}

TEST(Filter, EulerBeliefConvergesToExplicitMap) {
    // High signal-to-noise so the path-wise error is visible above roundoff.
    ModelParams p;
    p.mu0 = -0.05;
    const double T = 2.0;
    auto err_at = [&](int steps) {
        double sum = 0.0;
        const int paths = 300;
        for (int path = 0; path < paths; ++path) {
            CounterRng rng(RngStream{8, 8}, static_cast<std::uint64_t>(path));
            const int theta = rng.uniform() < 0.5 ? 1 : 0;
            const int fine = 512;
            std::vector<double> dw(fine);
            for (auto& w : dw) w = std::sqrt(T / fine) * rng.normal();
            double logx = 0.0;
            double pi = 0.5;
            const int agg = fine / steps;
            for (int i = 0; i < steps; ++i) {
                double w = 0.0;
                for (int j = 0; j < agg; ++j) w += dw[i * agg + j];
                const double h = T / steps;
                // Innovation increment under the filter's own estimate.
                const double innov = w + (drift(p, theta) - (p.mu0 + pi * (p.mu1 - p.mu0))) / p.sigma * h;
                logx += (drift(p, theta) - 0.5 * p.sigma * p.sigma) * h + p.sigma * w;
                pi = sde_belief_step(p, pi, innov, h);
            }
            sum += std::abs(pi - posterior_f(p, {T, 1.0, 0.5, std::exp(logx)}));
        }
        return sum / paths;
    };
    const double coarse = err_at(8);
    const double fine = err_at(128);
    EXPECT_LT(fine, coarse);
    // Order >= 0.4 over a factor 16 in dt.
    EXPECT_GT(std::log(coarse / fine) / std::log(16.0), 0.4);
}

TEST(Filter, SdeStepStaysInUnitInterval) {
    const ModelParams p;
    EXPECT_EQ(sde_belief_step(p, 0.999, 100.0, 0.01), 1.0);
    EXPECT_EQ(sde_belief_step(p, 0.001, -100.0, 0.01), 0.0);
    EXPECT_THROW(sde_belief_step(p, 0.5, 0.0, 0.0), std::invalid_argument);
    EXPECT_THROW(bayes_oracle(p, {0.0, 1.0, 0.5, 1.0}), std::invalid_argument);
}

TEST(Filter, ClassificationErrorMatchesExactRate) {
    // With prior 1/2 the posterior picks the wrong drift with probability
    // Phi(-snr sqrt(t) / 2).
    const ModelParams p;
    const double snr = signal_to_noise(p);
    for (double t : {100.0, 2000.0}) {
        int wrong = 0;
        const int n = 20'000;
        for (int i = 0; i < n; ++i) {
            CounterRng rng(RngStream{12, static_cast<std::uint64_t>(t)}, static_cast<std::uint64_t>(i));
            const int theta = rng.uniform() < 0.5 ? 1 : 0;
            const double logx = (drift(p, theta) - 0.5 * p.sigma * p.sigma) * t + p.sigma * std::sqrt(t) * rng.normal();
            const double pi = posterior_f(p, {t, 1.0, 0.5, std::exp(logx)});
            if ((pi > 0.5 ? 1 : 0) != theta) ++wrong;
        }
        const double rate = static_cast<double>(wrong) / n;
        const double exact = 0.5 * std::erfc(snr * std::sqrt(t) / 2.0 / std::sqrt(2.0));
        EXPECT_NEAR(rate, exact, 4.0 * std::sqrt(exact * (1 - exact) / n)) << t;
        if (t >= 2000.0) EXPECT_LT(rate, 0.05);
    }
}
