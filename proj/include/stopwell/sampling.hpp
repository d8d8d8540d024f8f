// Exact samplers for (theta, xi, X_xi, Pi_xi) and discretized GBM paths.
#pragma once

#include "stopwell/closed_form.hpp"
#include "stopwell/mc.hpp"
#include "stopwell/model.hpp"
#include "stopwell/rng.hpp"

#include <cstdint>
#include <vector>

namespace stopwell {

/// One draw at an independent Exp(r) time.
struct SampleOne {
    int theta;
    double xi;
    double x_xi;
    double pi_xi;
    double log_growth;  // ln(x_xi / x0); kept so callers can rescale x0 exactly
};

/// Draws theta ~ Bernoulli(pi0), xi ~ Exp(r), Z ~ N(0,1) and sets
/// X_xi = x0 exp((mu_theta - sigma^2/2) xi + sigma sqrt(xi) Z), Pi_xi = f(xi, x0, pi0, X_xi).
/// Consumes exactly the same draws for every state, so samples taken with the
/// same rng at different (x0, pi0) are common random numbers.
SampleOne sample_at_exponential_time(const ModelParams& params, const State& s0, CounterRng& rng);
SampleOne sample_at_exponential_time(const ModelParams& params, const State& s0, const RngStream& stream,
                                     std::uint64_t sample_index);

struct PathSample {
    int theta;
    std::vector<double> times;
    std::vector<double> x_path;
    std::vector<double> w_path;
};

/// Exact lognormal stepping on the grid 0, dt, 2dt, ... up to horizon.
PathSample simulate_path(const ModelParams& params, const State& s0, double horizon, double dt,
                         const RngStream& stream, std::uint64_t sample_index = 0);

/// Incremental form of simulate_path used by the path estimators.
class GbmStepper {
public:
    GbmStepper(const ModelParams& params, const State& s0, double dt, CounterRng& rng);

    void step();
    int theta() const { return theta_; }
    double time() const { return t_; }
    double log_growth() const { return log_growth_; }
    double x() const;
    double belief() const;

private:
    const ModelParams* params_;
    State s0_;
    CounterRng* rng_;
    int theta_;
    double drift_step_;
    double vol_step_;
    double t_ = 0.0;
    double log_growth_ = 0.0;
    std::uint64_t steps_ = 0;
    double dt_;
};

struct FirstPassageResult {
    McEstimate estimate;
    /// Upper bound on the discounted mass dropped by the horizon and by early
    /// termination of paths whose remaining contribution is provably negligible.
    double truncation_bound;
    bool truncation_warning;  // truncation_bound > 1e-3
};

/// Estimates E[exp(-r gamma)], gamma = first monitored time with X >= delta x0.
/// Paths are simulated with step dt and checked every monitor_stride steps;
/// with a common stream, stride 4 at dt gives the coarse companion of stride 1
/// at dt (same Brownian path, sparser monitoring).
FirstPassageResult first_passage_discounted(const ModelParams& params, const State& s0, double delta, double dt,
                                            double horizon, std::uint64_t n_samples, const RngStream& stream,
                                            int monitor_stride = 1, Exec exec = Exec::parallel);

/// first_passage_discounted for several monitoring strides on the same paths
/// in one pass; each stride must divide the next.
std::vector<FirstPassageResult> first_passage_ladder(const ModelParams& params, const State& s0, double delta,
                                                     double dt, double horizon, std::uint64_t n_samples,
                                                     const RngStream& stream, const std::vector<int>& strides,
                                                     Exec exec = Exec::parallel);

/// One-sided allowance for discrete monitoring at interval monitor_dt:
/// sum_i w_i delta^-beta_i (1 - exp(-beta_i * 0.5826 sigma sqrt(monitor_dt))),
/// the Broadie-Glasserman-Kou level shift applied to the closed form.
double discrete_monitoring_allowance(const ClosedFormPack& pack, double pi, double delta, double monitor_dt);

/// Path cutoff below which a remaining discounted contribution is ignored.
inline constexpr double kPathCutoff = 1e-7;

}  // namespace stopwell
