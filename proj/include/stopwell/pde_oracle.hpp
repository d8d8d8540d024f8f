// Finite-difference oracle for the obstacle problem
//
//   max{ (L - r) V, g - V } = 0  on (x, pi) in (0, inf) x [0, 1],
//
//   L u = (mu0 + pi (mu1 - mu0)) x u_x + 1/2 sigma^2 x^2 u_xx
//       + x (mu1 - mu0) pi (1 - pi) u_xpi + 1/2 ((mu1 - mu0)/sigma)^2 pi^2 (1 - pi)^2 u_pipi.
//
// Discretized in z = ln x on a uniform (z, pi) lattice:
//   - second differences central,
//   - first-order z term central where the cell Peclet number is <= 1 and
//     upwinded otherwise,
//   - cross term by the 4-corner central difference.
// The rows pi = 0 and pi = 1 are absorbing (1-D GBM generators); they are
// solved first and then act as Dirichlet data for the interior.
//
// Projected SOR comes in two sweep orders sharing one fixed point:
//   lexicographic   serial reference
//   row_red_black   even pi-rows in parallel, then odd rows; x sequential
//                   within a row (the 9-point stencil couples only adjacent rows)
#pragma once

#include "stopwell/boundary.hpp"
#include "stopwell/closed_form.hpp"
#include "stopwell/model.hpp"

#include <array>
#include <cstdint>
#include <stdexcept>
#include <vector>

namespace stopwell {

struct OracleGrid {
    std::size_t nx = 401;     // log-spaced profit nodes
    std::size_t npi = 101;    // uniform belief nodes
    double left_width = 4.0;  // x_min = x0* exp(-left_width)
    double right_width = 1.0; // x_max = x0* exp(right_width)
};

/// (L - r) discretized at every node; weights indexed [(di + 1) * 3 + (dj + 1)]
/// for the neighbour (pi row i + di, x column j + dj).
struct GeneratorStencil {
    std::size_t nx = 0;
    std::size_t npi = 0;
    double hz = 0.0;
    double hpi = 0.0;
    std::vector<double> x_nodes;
    std::vector<double> pi_nodes;
    std::vector<std::array<double, 9>> weights;  // row-major [i * nx + j]

    std::size_t at(std::size_t i, std::size_t j) const { return i * nx + j; }

    /// (L - r) u at node (i, j); requires 0 < j < nx - 1. Rows 0 and npi - 1
    /// only touch their own row.
    double apply(const std::vector<double>& u, std::size_t i, std::size_t j) const;
};

GeneratorStencil build_generator_stencil(const ModelParams& params, const OracleGrid& grid);

enum class SweepOrder { lexicographic, row_red_black };

struct ObstacleOptions {
    double tol = 1e-9;          // sup-norm change per sweep
    std::size_t max_sweeps = 200'000;
    double omega = 1.9;
    SweepOrder order = SweepOrder::lexicographic;
};

struct GridSolution {
    std::vector<double> x_nodes;
    std::vector<double> pi_nodes;
    std::vector<double> v;  // row-major [pi index][x index]
    std::vector<double> g;
    std::vector<std::uint8_t> stop_mask;
    std::vector<double> extracted_boundary;  // per pi row, before projection
    std::size_t sweeps = 0;
    double complementarity_residual = 0.0;
    std::size_t monotonicity_violations = 0;  // rows whose stop set is not up-closed in x
    double contact_eps = 0.0;

    std::size_t nx() const { return x_nodes.size(); }
    std::size_t npi() const { return pi_nodes.size(); }
    std::size_t at(std::size_t i, std::size_t j) const { return i * x_nodes.size() + j; }
};

class OracleError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Solves the discrete obstacle problem. Throws OracleError when PSOR does not
/// reach tol within max_sweeps or a row has no stopping node.
GridSolution solve_obstacle(const ModelParams& params, const OracleGrid& grid, const ObstacleOptions& options = {});

/// Boundary from the first stopping node of each row, refined by locating the
/// zero of sqrt(V - g) (quadratic contact) on the continuation side, then
/// projected into the admissible class.
BoundaryCurve extract_boundary(const ModelParams& params, const GridSolution& sol);

struct SmoothFitReport {
    std::vector<double> x_mismatch;   // per interior pi row
    std::vector<double> pi_mismatch;  // per x column whose stop set starts inside (0,1)
    double max_x_mismatch = 0.0;
    double max_pi_mismatch = 0.0;
};

/// One-sided difference quotients of V taken from the continuation side at
/// the first stopping node, compared with g_x and g_pi.
SmoothFitReport smooth_fit_diagnostic(const ModelParams& params, const GridSolution& sol);

}  // namespace stopwell
