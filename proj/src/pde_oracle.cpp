#include "stopwell/pde_oracle.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace stopwell {

namespace {

constexpr std::size_t k(int di, int dj) { return static_cast<std::size_t>((di + 1) * 3 + (dj + 1)); }

}  // namespace

double GeneratorStencil::apply(const std::vector<double>& u, std::size_t i, std::size_t j) const {
    const auto& w = weights[at(i, j)];
    double acc = 0.0;
    for (int di = -1; di <= 1; ++di) {
        if ((i == 0 && di < 0) || (i + 1 == npi && di > 0)) continue;
        for (int dj = -1; dj <= 1; ++dj) {
            const double c = w[k(di, dj)];
            if (c != 0.0) acc += c * u[at(i + di, j + dj)];
        }
    }
    return acc;
}

GeneratorStencil build_generator_stencil(const ModelParams& params, const OracleGrid& grid) {
    if (grid.nx < 3) throw std::invalid_argument("oracle grid needs >= 3 x nodes");
    if (grid.npi < 11) throw std::invalid_argument("oracle grid needs >= 11 pi nodes for the cross term");
    const ClosedFormPack pack = make_pack(params);

    GeneratorStencil st;
    st.nx = grid.nx;
    st.npi = grid.npi;
    const double z_lo = std::log(pack.xstar0) - grid.left_width;
    const double z_hi = std::log(pack.xstar0) + grid.right_width;
    st.hz = (z_hi - z_lo) / static_cast<double>(grid.nx - 1);
    st.hpi = 1.0 / static_cast<double>(grid.npi - 1);
    st.x_nodes.resize(grid.nx);
    st.pi_nodes.resize(grid.npi);
    for (std::size_t j = 0; j < grid.nx; ++j) st.x_nodes[j] = std::exp(z_lo + static_cast<double>(j) * st.hz);
    for (std::size_t i = 0; i < grid.npi; ++i) st.pi_nodes[i] = static_cast<double>(i) * st.hpi;
    st.pi_nodes.back() = 1.0;

    const double dmu = params.mu1 - params.mu0;
    const double a = 0.5 * params.sigma * params.sigma;
    const double hz = st.hz;
    const double hp = st.hpi;
    st.weights.assign(grid.nx * grid.npi, {});
    for (std::size_t i = 0; i < grid.npi; ++i) {
        const double pi = st.pi_nodes[i];
        const double p = pi * (1.0 - pi);
        const double m = params.mu0 + pi * dmu - a;
        const double cross = dmu * p;
        const double d = 0.5 * (dmu / params.sigma) * (dmu / params.sigma) * p * p;
        std::array<double, 9> w{};
        w[k(0, -1)] += a / (hz * hz);
        w[k(0, 1)] += a / (hz * hz);
        w[k(0, 0)] -= 2.0 * a / (hz * hz) + params.r;
        if (std::abs(m) * hz <= 2.0 * a) {
            w[k(0, 1)] += m / (2.0 * hz);
            w[k(0, -1)] -= m / (2.0 * hz);
        } else if (m > 0.0) {
            w[k(0, 1)] += m / hz;
            w[k(0, 0)] -= m / hz;
        } else {
            w[k(0, -1)] -= m / hz;
            w[k(0, 0)] += m / hz;
        }
        if (p > 0.0) {
            w[k(1, 0)] += d / (hp * hp);
            w[k(-1, 0)] += d / (hp * hp);
            w[k(0, 0)] -= 2.0 * d / (hp * hp);
            const double c4 = cross / (4.0 * hz * hp);
            w[k(1, 1)] += c4;
            w[k(-1, -1)] += c4;
            w[k(1, -1)] -= c4;
            w[k(-1, 1)] -= c4;
        }
        for (std::size_t j = 0; j < grid.nx; ++j) st.weights[st.at(i, j)] = w;
    }
    return st;
}

namespace {

// One projected Gauss-Seidel/SOR update of node (i, j); returns |change|.
inline double relax(const GeneratorStencil& st, std::vector<double>& v, const std::vector<double>& g,
                    std::size_t i, std::size_t j, double omega) {
    const std::size_t n = st.at(i, j);
    const auto& w = st.weights[n];
    const double center = w[k(0, 0)];
    const double off = st.apply(v, i, j) - center * v[n];
    const double gs = -off / center;
    const double old = v[n];
    const double next = std::max(g[n], old + omega * (gs - old));
    v[n] = next;
    return std::abs(next - old);
}

double sweep_row(const GeneratorStencil& st, std::vector<double>& v, const std::vector<double>& g, std::size_t i,
                 double omega) {
    double change = 0.0;
    for (std::size_t j = 1; j + 1 < st.nx; ++j) change = std::max(change, relax(st, v, g, i, j, omega));
    return change;
}

void psor(const GeneratorStencil& st, std::vector<double>& v, const std::vector<double>& g,
          std::size_t row_begin, std::size_t row_end, const ObstacleOptions& opt, std::size_t& sweeps) {
    for (std::size_t s = 0; s < opt.max_sweeps; ++s) {
        double change = 0.0;
        if (opt.order == SweepOrder::lexicographic || row_end - row_begin == 1) {
            for (std::size_t i = row_begin; i < row_end; ++i) change = std::max(change, sweep_row(st, v, g, i, opt.omega));
        } else {
            for (std::size_t parity = 0; parity < 2; ++parity) {
                const auto first = static_cast<std::int64_t>(row_begin + ((row_begin % 2 == parity) ? 0 : 1));
                double color_change = 0.0;
#pragma omp parallel for reduction(max : color_change) schedule(static)
                for (std::int64_t i = first; i < static_cast<std::int64_t>(row_end); i += 2) {
                    color_change = std::max(color_change, sweep_row(st, v, g, static_cast<std::size_t>(i), opt.omega));
                }
                change = std::max(change, color_change);
            }
        }
        ++sweeps;
        if (change < opt.tol) return;
    }
    throw OracleError("projected SOR did not converge in " + std::to_string(opt.max_sweeps) + " sweeps");
}

}  // namespace

GridSolution solve_obstacle(const ModelParams& params, const OracleGrid& grid, const ObstacleOptions& opt) {
    const ClosedFormPack pack = make_pack(params);
    const GeneratorStencil st = build_generator_stencil(params, grid);
    const std::size_t nx = st.nx;
    const std::size_t npi = st.npi;

    GridSolution sol;
    sol.x_nodes = st.x_nodes;
    sol.pi_nodes = st.pi_nodes;
    sol.contact_eps = 1e-6 * pack.xstar0;
    sol.g.resize(nx * npi);
    sol.v.resize(nx * npi);
    for (std::size_t i = 0; i < npi; ++i) {
        for (std::size_t j = 0; j < nx; ++j) sol.g[st.at(i, j)] = payoff_g(params, {st.x_nodes[j], st.pi_nodes[i]});
    }

    // Edge rows: absorbing beliefs, independent 1-D problems. Left boundary
    // V = 0 (V -> 0 as x -> 0), right boundary V = g (deep in the stopping set).
    for (std::size_t i : {std::size_t{0}, npi - 1}) {
        for (std::size_t j = 0; j < nx; ++j) sol.v[st.at(i, j)] = std::max(sol.g[st.at(i, j)], 0.0);
        sol.v[st.at(i, 0)] = 0.0;
        psor(st, sol.v, sol.g, i, i + 1, opt, sol.sweeps);
    }
    // Interior initial guess: full-information mixture of the edge rows.
    for (std::size_t i = 1; i + 1 < npi; ++i) {
        const double pi = st.pi_nodes[i];
        for (std::size_t j = 0; j < nx; ++j) {
            const double mix = (1.0 - pi) * sol.v[st.at(0, j)] + pi * sol.v[st.at(npi - 1, j)];
            sol.v[st.at(i, j)] = std::max(mix, sol.g[st.at(i, j)]);
        }
        sol.v[st.at(i, 0)] = 0.0;
        sol.v[st.at(i, nx - 1)] = sol.g[st.at(i, nx - 1)];
    }
    psor(st, sol.v, sol.g, 1, npi - 1, opt, sol.sweeps);

    sol.stop_mask.assign(nx * npi, 0);
    sol.extracted_boundary.assign(npi, 0.0);
    double comp = 0.0;
    for (std::size_t i = 0; i < npi; ++i) {
        for (std::size_t j = 0; j < nx; ++j) {
            const std::size_t n = st.at(i, j);
            const bool stop = sol.v[n] - sol.g[n] < sol.contact_eps;
            sol.stop_mask[n] = stop ? 1 : 0;
            if (j == 0 || j + 1 == nx) continue;
            const double pde = st.apply(sol.v, i, j);
            // Continuation: (L - r)V = 0. Stopping: V = g and (L - r)V <= 0.
            comp = std::max(comp, stop ? std::max(std::abs(sol.v[n] - sol.g[n]), 0.0) : std::abs(pde));
        }
        // Stop set must be up-closed in x (ignoring the Dirichlet column at x_min).
        bool seen = false;
        for (std::size_t j = 1; j < nx; ++j) {
            if (sol.stop_mask[st.at(i, j)]) {
                seen = true;
            } else if (seen) {
                ++sol.monotonicity_violations;
                break;
            }
        }
    }
    sol.complementarity_residual = comp;

    for (std::size_t i = 0; i < npi; ++i) {
        std::size_t first = nx;
        for (std::size_t j = nx - 1; j >= 1; --j) {
            if (!sol.stop_mask[st.at(i, j)]) break;
            first = j;
        }
        if (first == nx || first < 3) {
            throw OracleError("no interior stopping node in row pi=" + std::to_string(st.pi_nodes[i])
                              + "; widen the x domain");
        }
        const double x1 = st.x_nodes[first - 1];
        const double x2 = st.x_nodes[first - 2];
        const double s1 = std::sqrt(std::max(0.0, sol.v[st.at(i, first - 1)] - sol.g[st.at(i, first - 1)]));
        const double s2 = std::sqrt(std::max(0.0, sol.v[st.at(i, first - 2)] - sol.g[st.at(i, first - 2)]));
        double xb = st.x_nodes[first];
        if (s2 > s1) xb = x1 + s1 * (x1 - x2) / (s2 - s1);
        sol.extracted_boundary[i] = std::clamp(xb, x1, st.x_nodes[first]);
    }
    return sol;
}

BoundaryCurve extract_boundary(const ModelParams& params, const GridSolution& sol) {
    return project_to_class(make_pack(params), BoundaryCurve(sol.pi_nodes, sol.extracted_boundary));
}

SmoothFitReport smooth_fit_diagnostic(const ModelParams& params, const GridSolution& sol) {
    SmoothFitReport rep;
    const std::size_t nx = sol.nx();
    const std::size_t npi = sol.npi();
    for (std::size_t i = 1; i + 1 < npi; ++i) {
        std::size_t first = nx;
        for (std::size_t j = nx - 1; j >= 1; --j) {
            if (!sol.stop_mask[sol.at(i, j)]) break;
            first = j;
        }
        if (first == nx || first < 2) continue;
        const double dv = (sol.v[sol.at(i, first)] - sol.v[sol.at(i, first - 1)])
                        / (sol.x_nodes[first] - sol.x_nodes[first - 1]);
        const double m = std::abs(dv - perpetuity_factor(params, sol.pi_nodes[i]));
        rep.x_mismatch.push_back(m);
        rep.max_x_mismatch = std::max(rep.max_x_mismatch, m);
    }
    const double hpi = sol.pi_nodes[1] - sol.pi_nodes[0];
    for (std::size_t j = 1; j + 1 < nx; ++j) {
        // The stop set in a column is up-closed in pi (the boundary decreases).
        std::size_t first = npi;
        for (std::size_t i = npi; i-- > 0;) {
            if (!sol.stop_mask[sol.at(i, j)]) break;
            first = i;
        }
        if (first == npi || first == 0) continue;
        const double dv = (sol.v[sol.at(first, j)] - sol.v[sol.at(first - 1, j)]) / hpi;
        const double m = std::abs(dv - payoff_g_dpi(params, sol.x_nodes[j]));
        rep.pi_mismatch.push_back(m);
        rep.max_pi_mismatch = std::max(rep.max_pi_mismatch, m);
    }
    return rep;
}

}  // namespace stopwell
