// Model primitives for the investment problem with a hidden two-point drift.
#pragma once

#include <stdexcept>
#include <string>

namespace stopwell {

/// Economic primitives. Rates are per unit time; invest_cost is the sunk cost I.
struct ModelParams {
    double mu0 = 0.01;
    double mu1 = 0.03;
    double sigma = 0.2;
    double r = 0.05;
    double invest_cost = 100.0;

    bool operator==(const ModelParams&) const = default;
};

/// Reference parameter set used throughout the tests and CLI defaults.
inline constexpr ModelParams kReferenceParams{};

/// Snapshot of profit level and belief P(theta = 1).
struct State {
    double x;
    double pi;
};

enum class ValidationFailure {
    non_positive_sigma,
    drift_ordering,      // mu0 >= mu1
    discount_too_small,  // r <= max(0, mu1)
    non_positive_cost,
    non_finite,
};

class ValidationError : public std::invalid_argument {
public:
    ValidationError(ValidationFailure failure, const std::string& what)
        : std::invalid_argument(what), failure_(failure) {}

    ValidationFailure failure() const noexcept { return failure_; }

private:
    ValidationFailure failure_;
};

/// Returns the params unchanged, or throws ValidationError naming the first
/// violated constraint.
ModelParams validate(const ModelParams& params);

/// Throws ValidationError unless x > 0 and pi in [0,1].
void validate_state(const State& s);

/// d g / d x = (1-pi)/(r-mu0) + pi/(r-mu1): the expected perpetuity factor.
inline double perpetuity_factor(const ModelParams& p, double pi) {
    return (1.0 - pi) / (p.r - p.mu0) + pi / (p.r - p.mu1);
}

/// Immediate-investment payoff g(x, pi) = x * perpetuity_factor(pi) - I.
inline double payoff_g(const ModelParams& p, const State& s) {
    return s.x * perpetuity_factor(p, s.pi) - p.invest_cost;
}

/// d g / d pi = x (1/(r-mu1) - 1/(r-mu0)).
inline double payoff_g_dpi(const ModelParams& p, double x) {
    return x * (1.0 / (p.r - p.mu1) - 1.0 / (p.r - p.mu0));
}

inline double drift(const ModelParams& p, int theta) { return theta == 0 ? p.mu0 : p.mu1; }

/// (mu1 - mu0) / sigma.
inline double signal_to_noise(const ModelParams& p) { return (p.mu1 - p.mu0) / p.sigma; }

std::string to_string(ValidationFailure f);

}  // namespace stopwell
