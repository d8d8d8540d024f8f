#include "stopwell/sampling.hpp"

#include "stopwell/belief_filter.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace stopwell {

SampleOne sample_at_exponential_time(const ModelParams& p, const State& s0, CounterRng& rng) {
    const double u = rng.uniform();
    const double xi = rng.exponential(p.r);
    const double z = rng.normal();
    SampleOne out{};
    out.theta = u < s0.pi ? 1 : 0;
    out.xi = xi;
    out.log_growth = (drift(p, out.theta) - 0.5 * p.sigma * p.sigma) * xi + p.sigma * std::sqrt(xi) * z;
    out.x_xi = s0.x * std::exp(out.log_growth);
    out.pi_xi = posterior_from_log_ratio(s0.pi, log_likelihood_ratio(p, xi, out.log_growth));
    return out;
}

SampleOne sample_at_exponential_time(const ModelParams& p, const State& s0, const RngStream& stream,
                                     std::uint64_t sample_index) {
    CounterRng rng(stream, sample_index);
    return sample_at_exponential_time(p, s0, rng);
}

GbmStepper::GbmStepper(const ModelParams& p, const State& s0, double dt, CounterRng& rng)
    : params_(&p), s0_(s0), rng_(&rng), dt_(dt) {
    if (!(dt > 0.0)) throw std::invalid_argument("dt must be > 0");
    theta_ = rng.uniform() < s0.pi ? 1 : 0;
    drift_step_ = (drift(p, theta_) - 0.5 * p.sigma * p.sigma) * dt;
    vol_step_ = p.sigma * std::sqrt(dt);
}

void GbmStepper::step() {
    log_growth_ += drift_step_ + vol_step_ * rng_->normal();
    ++steps_;
    t_ = static_cast<double>(steps_) * dt_;
}

double GbmStepper::x() const { return s0_.x * std::exp(log_growth_); }

double GbmStepper::belief() const {
    return posterior_from_log_ratio(s0_.pi, log_likelihood_ratio(*params_, t_, log_growth_));
}

PathSample simulate_path(const ModelParams& p, const State& s0, double horizon, double dt, const RngStream& stream,
                         std::uint64_t sample_index) {
    if (!(dt > 0.0) || !(horizon >= dt)) throw std::invalid_argument("simulate_path: need dt > 0 and horizon >= dt");
    CounterRng rng(stream, sample_index);
    GbmStepper stepper(p, s0, dt, rng);
    const auto steps = static_cast<std::size_t>(std::floor(horizon / dt + 1e-9));
    PathSample path;
    path.theta = stepper.theta();
    path.times.reserve(steps + 1);
    path.x_path.reserve(steps + 1);
    path.w_path.reserve(steps + 1);
    const double nu = drift(p, path.theta) - 0.5 * p.sigma * p.sigma;
    path.times.push_back(0.0);
    path.x_path.push_back(s0.x);
    path.w_path.push_back(0.0);
    for (std::size_t i = 0; i < steps; ++i) {
        stepper.step();
        path.times.push_back(stepper.time());
        path.x_path.push_back(stepper.x());
        path.w_path.push_back((stepper.log_growth() - nu * stepper.time()) / p.sigma);
    }
    return path;
}

namespace {

// Steps between checks of the early-termination bound. A multiple of every
// monitoring stride used in practice, so coarse and fine runs driven by the same
// stream terminate at identical times.
constexpr std::uint64_t kCutoffCheckEvery = 64;

}  // namespace

std::vector<FirstPassageResult> first_passage_ladder(const ModelParams& p, const State& s0, double delta,
                                                     double dt, double horizon, std::uint64_t n_samples,
                                                     const RngStream& stream, const std::vector<int>& strides,
                                                     Exec exec) {
    if (delta < 1.0) throw std::invalid_argument("delta must be >= 1");
    if (!(dt > 0.0) || !(horizon >= dt)) throw std::invalid_argument("need dt > 0 and horizon >= dt");
    if (strides.empty()) throw std::invalid_argument("need at least one monitoring stride");
    for (std::size_t i = 0; i < strides.size(); ++i) {
        if (strides[i] < 1) throw std::invalid_argument("monitor strides must be >= 1");
        if (i > 0 && strides[i] % strides[i - 1] != 0) {
            throw std::invalid_argument("each monitor stride must divide the next");
        }
    }
    const ClosedFormPack pack = make_pack(p);
    const double log_level = std::log(delta);
    const auto max_steps = static_cast<std::uint64_t>(std::floor(horizon / dt + 1e-9));
    const std::size_t k = strides.size();
    // E[exp(-r (gamma - t)) | X_t] <= (X_t / level)^beta for the smaller root.
    const double beta_lo = std::min(pack.beta0, pack.beta1);

    auto path_values = [&](CounterRng& rng, std::span<double> out) {
        GbmStepper path(p, s0, dt, rng);
        std::fill(out.begin(), out.end(), 0.0);
        if (log_level <= 0.0) {
            std::fill(out.begin(), out.end(), 1.0);
            return;
        }
        // Coarser strides monitor a subset of the finer times, so they hit
        // later; `open` is the first stride still waiting.
        std::size_t open = 0;
        for (std::uint64_t step = 1; step <= max_steps && open < k; ++step) {
            path.step();
            if (path.log_growth() >= log_level) {
                for (std::size_t j = open; j < k; ++j) {
                    if (step % static_cast<std::uint64_t>(strides[j]) != 0) break;
                    out[j] = std::exp(-p.r * path.time());
                    open = j + 1;
                }
            }
            if (step % kCutoffCheckEvery == 0) {
                const double bound = std::exp(-p.r * path.time() + beta_lo * (path.log_growth() - log_level));
                if (bound < kPathCutoff) return;
            }
        }
    };

    const auto est = estimate_means(n_samples, k, stream, path_values, exec);
    const double bound = std::exp(-p.r * static_cast<double>(max_steps) * dt) + kPathCutoff;
    std::vector<FirstPassageResult> out;
    for (const auto& e : est) out.push_back({e, bound, bound > 1e-3});
    return out;
}

FirstPassageResult first_passage_discounted(const ModelParams& p, const State& s0, double delta, double dt,
                                            double horizon, std::uint64_t n_samples, const RngStream& stream,
                                            int monitor_stride, Exec exec) {
    return first_passage_ladder(p, s0, delta, dt, horizon, n_samples, stream, {monitor_stride}, exec).front();
}

double discrete_monitoring_allowance(const ClosedFormPack& pack, double pi, double delta, double monitor_dt) {
    constexpr double kBgkShift = 0.5826;  // -zeta(1/2) / sqrt(2 pi)
    const double shift = kBgkShift * pack.params.sigma * std::sqrt(monitor_dt);
    double total = 0.0;
    for (int i = 0; i < 2; ++i) {
        const double w = i == 0 ? 1.0 - pi : pi;
        const double b = pack.beta(i);
        total += w * std::pow(delta, -b) * (1.0 - std::exp(-b * shift));
    }
    return total;
}

}  // namespace stopwell
