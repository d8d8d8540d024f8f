#include "stopwell/model.hpp"

#include <algorithm>
#include <cmath>

namespace stopwell {

ModelParams validate(const ModelParams& p) {
    for (double v : {p.mu0, p.mu1, p.sigma, p.r, p.invest_cost}) {
        if (!std::isfinite(v)) {
            throw ValidationError(ValidationFailure::non_finite, "model parameters must be finite");
        }
    }
    if (!(p.sigma > 0.0)) {
        throw ValidationError(ValidationFailure::non_positive_sigma, "sigma must be > 0");
    }
    if (!(p.mu0 < p.mu1)) {
        throw ValidationError(ValidationFailure::drift_ordering, "drifts must satisfy mu0 < mu1");
    }
    if (!(p.r > std::max(0.0, p.mu1))) {
        throw ValidationError(ValidationFailure::discount_too_small,
                              "discount rate must satisfy r > max(0, mu1)");
    }
    if (!(p.invest_cost > 0.0)) {
        throw ValidationError(ValidationFailure::non_positive_cost, "invest_cost must be > 0");
    }
    return p;
}

void validate_state(const State& s) {
    if (!(s.x > 0.0) || !std::isfinite(s.x)) {
        throw ValidationError(ValidationFailure::non_finite, "profit level x must be finite and > 0");
    }
    if (!(s.pi >= 0.0 && s.pi <= 1.0)) {
        throw ValidationError(ValidationFailure::non_finite, "belief pi must lie in [0,1]");
    }
}

std::string to_string(ValidationFailure f) {
    switch (f) {
        case ValidationFailure::non_positive_sigma: return "non_positive_sigma";
        case ValidationFailure::drift_ordering: return "drift_ordering";
        case ValidationFailure::discount_too_small: return "discount_too_small";
        case ValidationFailure::non_positive_cost: return "non_positive_cost";
        case ValidationFailure::non_finite: return "non_finite";
    }
    return "unknown";
}

}  // namespace stopwell
