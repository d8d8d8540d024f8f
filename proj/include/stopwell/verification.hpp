// The acceptance checks, shared by `stopwell verify` and the acceptance test
// binary. Each check returns one pass/fail record with a short numeric detail.
#pragma once

#include "stopwell/boundary.hpp"
#include "stopwell/mc.hpp"
#include "stopwell/pde_oracle.hpp"
#include "stopwell/rng.hpp"

#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace stopwell::verify {

struct Settings {
    std::uint64_t seed = kDefaultSeed;
    Exec exec = Exec::parallel;

    std::size_t closed_form_draws = 1000;
    std::size_t filter_draws = 10'000;
    std::size_t filter_paths = 2000;
    std::uint64_t mean_samples = 1'000'000;
    std::uint64_t hitting_samples = 100'000;
    double hitting_dt = 0.01;
    std::uint64_t value_samples = 1'000'000;
    std::size_t grid_m = 101;
    std::uint64_t boundary_samples = 1'000'000;
    OracleGrid oracle_grid{};
    std::uint64_t voi_samples = 1'000'000;
    std::size_t voi_points = 200;
    std::size_t robust_m = 51;
    std::uint64_t robust_samples = 200'000;

    /// The acceptance sizes.
    static Settings full(std::uint64_t seed);
    /// Reduced sizes for a smoke run of a minute or two.
    static Settings quick(std::uint64_t seed);
};

struct CriterionResult {
    int id = 0;
    std::string name;
    bool pass = false;
    std::string detail;
    double seconds = 0.0;
};

/// "PASS [n] name (t s) detail"
std::string format_result(const CriterionResult& r);

/// Runs criteria and caches the reference boundary and oracle solution that
/// several of them share.
class Suite {
public:
    static constexpr int kCount = 10;

    explicit Suite(Settings settings);

    CriterionResult run(int id);
    std::vector<CriterionResult> run_all(const std::function<void(const CriterionResult&)>& on_result = {});

    const FixedPointResult& reference_boundary();
    const GridSolution& reference_oracle();

private:
    CriterionResult closed_form();
    CriterionResult filter_equivalence();
    CriterionResult exponential_time_means();
    CriterionResult hitting_time();
    CriterionResult known_drift_values();
    CriterionResult integral_residual();
    CriterionResult boundary_structure();
    CriterionResult oracle_cross_validation();
    CriterionResult value_of_information();
    CriterionResult robustness();

    RngStream stream(std::uint64_t id) const { return {settings_.seed, id}; }

    Settings settings_;
    std::optional<FixedPointResult> boundary_;
    std::optional<GridSolution> oracle_;
    double boundary_seconds_ = 0.0;
};

}  // namespace stopwell::verify
