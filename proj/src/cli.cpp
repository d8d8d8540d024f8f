#include "stopwell/cli.hpp"

#include "stopwell/boundary.hpp"
#include "stopwell/closed_form.hpp"
#include "stopwell/io.hpp"
#include "stopwell/pde_oracle.hpp"
#include "stopwell/valuation.hpp"
#include "stopwell/verification.hpp"

#include "CLI11.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <iostream>
#include <limits>
#include <sstream>

namespace stopwell::cli {

namespace {

namespace fs = std::filesystem;
using nlohmann::json;
using Clock = std::chrono::steady_clock;

// Stream ids per subcommand, so that outputs of different subcommands are
// independent for a given seed.
constexpr std::uint64_t kStreamBoundary = 1;
constexpr std::uint64_t kStreamValue = 2;
constexpr std::uint64_t kStreamVoi = 3;
constexpr std::uint64_t kStreamFigures = 4;

template <class T>
T parse_text(const std::string& key, const std::string& text) {
    if constexpr (std::is_same_v<T, std::string>) {
        return text;
    } else if constexpr (std::is_same_v<T, std::vector<double>> || std::is_same_v<T, std::vector<int>>) {
        T out;
        std::stringstream ss(text);
        std::string cell;
        while (std::getline(ss, cell, ',')) out.push_back(parse_text<typename T::value_type>(key, cell));
        return out;
    } else {
        T v{};
        if (!CLI::detail::lexical_cast(text, v)) throw std::invalid_argument("config: bad value for " + key + ": " + text);
        return v;
    }
}

// A flag that may also be set from the config file's [numerics] section and
// is recorded in, and restored from, the run manifest.
class Flags {
public:
    explicit Flags(CLI::App* app) : app_(app) {}

    template <class T>
    CLI::Option* add(const std::string& names, const std::string& key, T& target, const std::string& help) {
        CLI::Option* opt = app_->add_option(names, target, help)->capture_default_str();
        if constexpr (std::is_same_v<T, std::vector<double>> || std::is_same_v<T, std::vector<int>>) {
            opt->delimiter(',');
        }
        items_.push_back({key, opt, [&target, key](const std::string& s) { target = parse_text<T>(key, s); },
                          [&target] { return json(target); }, [&target](const json& j) { target = j.get<T>(); }});
        return opt;
    }

    void flag(const std::string& names, const std::string& key, bool& target, const std::string& help) {
        CLI::Option* opt = app_->add_flag(names, target, help);
        items_.push_back({key, opt, [&target, key](const std::string& s) { target = parse_text<bool>(key, s); },
                          [&target] { return json(target); }, [&target](const json& j) { target = j.get<bool>(); }});
    }

    void apply_config(const io::Config& cfg) {
        for (auto& it : items_) {
            if (it.opt->count() > 0) continue;
            if (const auto v = cfg.numeric(it.key)) it.from_text(*v);
        }
    }

    void apply_manifest(const json& flags) {
        for (auto& it : items_) {
            if (flags.contains(it.key)) it.from_json(flags.at(it.key));
        }
    }

    json to_json() const {
        json j = json::object();
        for (const auto& it : items_) j[it.key] = it.to_json();
        return j;
    }

private:
    struct Item {
        std::string key;
        CLI::Option* opt;
        std::function<void(const std::string&)> from_text;
        std::function<json()> to_json;
        std::function<void(const json&)> from_json;
    };
    CLI::App* app_;
    std::vector<Item> items_;
};

struct Context {
    ModelParams params;
    std::uint64_t seed = 0;
    fs::path out;
    fs::path manifest_path;
    io::Config config;
    io::RunManifest manifest;
    Clock::time_point start = Clock::now();

    template <class F>
    auto timed(const std::string& stage, F&& f) {
        const auto t0 = Clock::now();
        if constexpr (std::is_void_v<decltype(f())>) {
            f();
            manifest.timings_s.emplace_back(stage, std::chrono::duration<double>(Clock::now() - t0).count());
        } else {
            auto r = f();
            manifest.timings_s.emplace_back(stage, std::chrono::duration<double>(Clock::now() - t0).count());
            return r;
        }
    }

    fs::path file(const std::string& name) const { return out / name; }
};

std::vector<double> linspace_open(double hi, std::size_t n) {
    std::vector<double> xs;
    for (std::size_t j = 1; j <= n; ++j) xs.push_back(hi * static_cast<double>(j) / static_cast<double>(n));
    return xs;
}

// ---- subcommand options ------------------------------------------------------

struct BoundaryOpts {
    std::size_t m = 101;
    std::uint64_t samples = 1'000'000;
    double tol = 0.0;
    std::size_t max_iter = 200;
    std::string init = "lower";

    void bind(Flags& f) {
        f.add("--m", "m", m, "Belief grid nodes")->check(CLI::Range(std::size_t{2}, std::size_t{100000}));
        f.add("--samples", "samples", samples, "Monte-Carlo samples per node and iteration");
        f.add("--tol", "tol", tol, "Sup-norm stopping tolerance (0 = automatic)");
        f.add("--max-iter", "max_iter", max_iter, "Iteration cap");
        f.add("--init", "init", init, "Initial curve: lower | upper")->check(CLI::IsMember({"lower", "upper"}));
    }
};

struct CurveSourceOpts {
    BoundaryOpts solve;
    std::string boundary_csv;

    void bind(Flags& f) {
        solve.bind(f);
        f.add("--boundary-csv", "boundary_csv", boundary_csv, "Read the boundary (pi,b) instead of solving");
    }
};

struct ValueOpts {
    CurveSourceOpts curve;
    std::vector<double> x;
    std::vector<double> pi{0.5};
    std::size_t nx = 50;
    double x_max = 0.0;
    std::uint64_t value_samples = 1'000'000;

    void bind(Flags& f) {
        curve.bind(f);
        f.add("--x", "x", x, "Profit levels (comma separated); default is a grid up to --x-max");
        f.add("--pi", "pi", pi, "Beliefs (comma separated)");
        f.add("--nx", "nx", nx, "Grid points when --x is not given");
        f.add("--x-max", "x_max", x_max, "Grid upper end (0 = 1.2 b(0))");
        f.add("--value-samples", "value_samples", value_samples, "Samples per belief slice");
    }
};

struct VoiOpts {
    CurveSourceOpts curve;
    std::vector<double> pi{0.25, 0.5, 0.75};
    std::size_t nx = 100;
    std::uint64_t value_samples = 1'000'000;

    void bind(Flags& f) {
        curve.bind(f);
        f.add("--pi", "pi", pi, "Beliefs (comma separated)");
        f.add("--nx", "nx", nx, "Profit grid points on (0, b(0)]");
        f.add("--value-samples", "value_samples", value_samples, "Samples per belief slice");
    }
};

struct OracleOpts {
    std::size_t nx = 401;
    std::size_t npi = 101;
    double left_width = 4.0;
    double right_width = 1.0;
    double omega = 1.9;
    double psor_tol = 1e-9;
    std::size_t max_sweeps = 200'000;
    std::string order = "lexicographic";

    void bind(Flags& f) {
        f.add("--oracle-nx", "oracle_nx", nx, "Log-spaced profit nodes");
        f.add("--oracle-npi", "oracle_npi", npi, "Belief nodes (>= 11)");
        f.add("--left-width", "left_width", left_width, "x_min = x0* exp(-left_width)");
        f.add("--right-width", "right_width", right_width, "x_max = x0* exp(right_width)");
        f.add("--omega", "omega", omega, "SOR relaxation factor")->check(CLI::Range(0.1, 1.999));
        f.add("--psor-tol", "psor_tol", psor_tol, "Sup-norm change per sweep at convergence");
        f.add("--max-sweeps", "max_sweeps", max_sweeps, "Sweep cap");
        f.add("--order", "order", order, "lexicographic | red-black")
            ->check(CLI::IsMember({"lexicographic", "red-black"}));
    }
};

struct VerifyOpts {
    bool quick = false;
    std::vector<int> only;

    void bind(Flags& f) {
        f.flag("--quick", "quick", quick, "Reduced sample sizes");
        f.add("--only", "only", only, "Criterion numbers to run (comma separated)");
    }
};

struct FiguresOpts {
    BoundaryOpts solve;
    std::vector<double> pi{0.25, 0.5, 0.75};
    std::size_t nx = 100;
    std::uint64_t value_samples = 200'000;
    std::string sweep;

    void bind(Flags& f) {
        solve.bind(f);
        f.add("--pi", "pi", pi, "Beliefs for the value-of-information slices");
        f.add("--nx", "nx", nx, "Profit grid points on (0, b(0)]");
        f.add("--value-samples", "value_samples", value_samples, "Samples per belief slice");
        f.add("--sweep", "sweep", sweep, "Config file with [sweep.<name>] sections");
    }
};

// ---- shared steps ------------------------------------------------------------

FixedPointResult solve_boundary(Context& ctx, const ModelParams& p, const BoundaryOpts& o, std::uint64_t stream_id) {
    const ClosedFormPack pack = make_pack(p);
    const BoundaryCurve init =
        o.init == "upper" ? BoundaryCurve::constant(o.m, pack.xstar0) : BoundaryCurve::lower_bound(pack, o.m);
    FixedPointOptions fo;
    fo.tol = o.tol;
    fo.max_iter = o.max_iter;
    fo.n_samples = o.samples;
    return fixed_point_solve(p, init, fo, RngStream{ctx.seed, stream_id});
}

json report_json(const IterationReport& r) {
    return {{"iterations", r.iterations},
            {"converged", r.converged},
            {"tolerance", r.tolerance},
            {"max_update_se", r.max_update_se},
            {"samples_per_node", r.samples_per_node},
            {"sup_change_history", r.sup_change_history},
            {"residual_history", r.residual_history}};
}

BoundaryCurve obtain_curve(Context& ctx, const CurveSourceOpts& o) {
    if (!o.boundary_csv.empty()) {
        const auto table = io::read_csv(o.boundary_csv);
        return project_to_class(make_pack(ctx.params), BoundaryCurve(table.column("pi"), table.column("b")));
    }
    auto fp = ctx.timed("fixed_point", [&] { return solve_boundary(ctx, ctx.params, o.solve, kStreamBoundary); });
    ctx.manifest.results["boundary"] = report_json(fp.report);
    return fp.curve;
}

void write_boundary_csv(const fs::path& path, std::uint64_t seed, const ClosedFormPack& pack,
                        const BoundaryCurve& curve, const std::vector<PsiNode>* nodes) {
    io::CsvWriter csv(path, seed, {"pi", "b", "b_lower", "residual", "residual_se"});
    const double nan = std::numeric_limits<double>::quiet_NaN();
    for (std::size_t i = 0; i < curve.size(); ++i) {
        const double pi = curve.pi_grid()[i];
        csv.row({pi, curve.values()[i], lower_bound_b(pack, pi), nodes ? (*nodes)[i].residual.mean : nan,
                 nodes ? (*nodes)[i].residual.std_error : nan});
    }
    csv.close();
}

// ---- subcommands ---------------------------------------------------------------

void cmd_thresholds(Context& ctx, const BoundaryOpts& o) {
    const ClosedFormPack pack = make_pack(ctx.params);
    std::printf("beta0 = %.6f\nbeta1 = %.6f\nx0*   = %.4f\nx1*   = %.4f\nrI    = %.4f\n", pack.beta0, pack.beta1,
                pack.xstar0, pack.xstar1, ctx.params.r * ctx.params.invest_cost);
    io::CsvWriter csv(ctx.file("thresholds.csv"), ctx.seed, {"pi", "b_lower"});
    const auto curve = BoundaryCurve::uniform(o.m, [&](double pi) { return lower_bound_b(pack, pi); });
    for (std::size_t i = 0; i < curve.size(); ++i) csv.row({curve.pi_grid()[i], curve.values()[i]});
    csv.close();
    ctx.manifest.results = {{"beta0", pack.beta0}, {"beta1", pack.beta1}, {"xstar0", pack.xstar0},
                            {"xstar1", pack.xstar1}};
}

void cmd_boundary(Context& ctx, const BoundaryOpts& o) {
    const ClosedFormPack pack = make_pack(ctx.params);
    const auto fp = ctx.timed("fixed_point", [&] { return solve_boundary(ctx, ctx.params, o, kStreamBoundary); });
    write_boundary_csv(ctx.file("boundary.csv"), ctx.seed, pack, fp.curve, &fp.last_nodes);
    ctx.manifest.results = report_json(fp.report);
    std::printf("converged in %zu iterations (tol %.3g); b(0) = %.5f, b(0.5) = %.5f, b(1) = %.5f\n",
                fp.report.iterations, fp.report.tolerance, fp.curve(0.0), fp.curve(0.5), fp.curve(1.0));
}

void cmd_value(Context& ctx, const ValueOpts& o) {
    const BoundaryCurve curve = obtain_curve(ctx, o.curve);
    std::vector<double> xs = o.x;
    if (xs.empty()) xs = linspace_open(o.x_max > 0.0 ? o.x_max : 1.2 * curve(0.0), o.nx);
    io::CsvWriter csv(ctx.file("value.csv"), ctx.seed, {"x", "pi", "v", "se"});
    ctx.timed("value", [&] {
        for (std::size_t k = 0; k < o.pi.size(); ++k) {
            const auto est = value_slice(ctx.params, curve, xs, o.pi[k], o.value_samples,
                                         RngStream{ctx.seed, kStreamValue}.child(k));
            for (std::size_t j = 0; j < xs.size(); ++j) csv.row({xs[j], o.pi[k], est[j].mean, est[j].std_error});
        }
    });
    csv.close();
}

void write_voi_rows(io::CsvWriter& csv, const VoiSurface& s, bool full) {
    for (std::size_t p = 0; p < s.pi_grid.size(); ++p) {
        for (std::size_t j = 0; j < s.x_grid.size(); ++j) {
            const std::size_t k = s.index(p, j);
            if (full) {
                csv.row({s.x_grid[j], s.pi_grid[p], s.v_bar[k], s.v[k], s.delta[k], s.delta_se[k]});
            } else {
                csv.row({s.x_grid[j], s.pi_grid[p], s.delta[k], s.delta_se[k]});
            }
        }
    }
}

void cmd_voi(Context& ctx, const VoiOpts& o) {
    const BoundaryCurve curve = obtain_curve(ctx, o.curve);
    const auto xs = linspace_open(curve(0.0), o.nx);
    const auto s = ctx.timed("voi", [&] {
        return value_of_information(ctx.params, curve, xs, o.pi, o.value_samples, RngStream{ctx.seed, kStreamVoi});
    });
    io::CsvWriter csv(ctx.file("voi.csv"), ctx.seed, {"x", "pi", "v_bar", "v", "delta", "delta_se"});
    write_voi_rows(csv, s, true);
    csv.close();
    ctx.manifest.results["argmax_x"] = s.argmax_x;
}

void cmd_oracle(Context& ctx, const OracleOpts& o) {
    const ClosedFormPack pack = make_pack(ctx.params);
    ObstacleOptions so;
    so.omega = o.omega;
    so.tol = o.psor_tol;
    so.max_sweeps = o.max_sweeps;
    so.order = o.order == "red-black" ? SweepOrder::row_red_black : SweepOrder::lexicographic;
    const auto sol = ctx.timed("psor", [&] {
        return solve_obstacle(ctx.params, OracleGrid{o.nx, o.npi, o.left_width, o.right_width}, so);
    });
    io::CsvWriter surf(ctx.file("oracle_surface.csv"), ctx.seed, {"x", "pi", "v", "g", "stop"});
    for (std::size_t i = 0; i < sol.npi(); ++i) {
        for (std::size_t j = 0; j < sol.nx(); ++j) {
            const std::size_t n = sol.at(i, j);
            surf.row({sol.x_nodes[j], sol.pi_nodes[i], sol.v[n], sol.g[n], static_cast<double>(sol.stop_mask[n])});
        }
    }
    surf.close();
    write_boundary_csv(ctx.file("oracle_boundary.csv"), ctx.seed, pack, extract_boundary(ctx.params, sol), nullptr);
    const auto sf = smooth_fit_diagnostic(ctx.params, sol);
    ctx.manifest.results = {{"sweeps", sol.sweeps},
                            {"complementarity_residual", sol.complementarity_residual},
                            {"monotonicity_violations", sol.monotonicity_violations},
                            {"smooth_fit_x", sf.max_x_mismatch},
                            {"smooth_fit_pi", sf.max_pi_mismatch}};
    std::printf("%zu sweeps, complementarity residual %.3g, smooth-fit mismatch %.4f (x) %.4f (pi)\n", sol.sweeps,
                sol.complementarity_residual, sf.max_x_mismatch, sf.max_pi_mismatch);
}

bool cmd_verify(Context& ctx, const VerifyOpts& o) {
    auto settings = o.quick ? verify::Settings::quick(ctx.seed) : verify::Settings::full(ctx.seed);
    verify::Suite suite(settings);
    std::vector<int> ids = o.only;
    if (ids.empty()) {
        for (int i = 1; i <= verify::Suite::kCount; ++i) ids.push_back(i);
    }
    for (int id : ids) {
        if (id < 1 || id > verify::Suite::kCount) throw std::invalid_argument("no criterion " + std::to_string(id));
    }
    std::string log;
    bool all = true;
    for (int id : ids) {
        const auto r = suite.run(id);
        const std::string line = verify::format_result(r);
        std::puts(line.c_str());
        std::fflush(stdout);
        log += line + "\n";
        all = all && r.pass;
        ctx.manifest.results[std::to_string(id)] = {{"pass", r.pass}, {"seconds", r.seconds}};
    }
    io::write_text(ctx.file("verify.txt"), log);
    return all;
}

std::string gnuplot_stub(const std::vector<io::SweepSet>& sets) {
    std::string s =
        "# Plots the figure datasets written next to this file.\n"
        "set datafile separator ','\n"
        "set key autotitle columnhead\n"
        "set terminal pngcairo size 1000,700\n\n"
        "set output 'boundaries.png'\n"
        "set xlabel 'pi'\nset ylabel 'x'\n"
        "plot \\\n";
    for (std::size_t i = 0; i < sets.size(); ++i) {
        const std::string f = "boundary_" + sets[i].name + ".csv";
        s += "  '" + f + "' using 1:2 with lines title '" + sets[i].name + " b', '" + f +
             "' using 1:3 with lines dashtype 2 title '" + sets[i].name + " lower bound'";
        s += i + 1 < sets.size() ? ", \\\n" : "\n";
    }
    s += "\nset xlabel 'x'\nset ylabel 'Delta'\n";
    for (const auto& set : sets) {
        s += "set output 'voi_" + set.name + ".png'\n";
        s += "plot 'voi_" + set.name + ".csv' using 1:($2 == 0.5 ? $3 : 1/0) with lines title 'pi = 0.5'\n";
    }
    return s;
}

void cmd_figures(Context& ctx, const FiguresOpts& o, std::vector<io::SweepSet>& sets) {
    for (const auto& set : sets) {
        const ClosedFormPack pack = make_pack(set.params);
        // One stream for every set: common random numbers across parameters.
        const auto fp =
            ctx.timed("boundary_" + set.name, [&] { return solve_boundary(ctx, set.params, o.solve, kStreamFigures); });
        io::CsvWriter b(ctx.file("boundary_" + set.name + ".csv"), ctx.seed, {"pi", "b", "b_lower"});
        for (std::size_t i = 0; i < fp.curve.size(); ++i) {
            const double pi = fp.curve.pi_grid()[i];
            b.row({pi, fp.curve.values()[i], lower_bound_b(pack, pi)});
        }
        b.close();
        const auto xs = linspace_open(fp.curve(0.0), o.nx);
        const auto s = ctx.timed("voi_" + set.name, [&] {
            return value_of_information(set.params, fp.curve, xs, o.pi, o.value_samples,
                                        RngStream{ctx.seed, kStreamFigures + 1});
        });
        io::CsvWriter v(ctx.file("voi_" + set.name + ".csv"), ctx.seed, {"x", "pi", "delta", "delta_se"});
        write_voi_rows(v, s, false);
        v.close();
        ctx.manifest.results[set.name] = report_json(fp.report);
        std::printf("%-12s b(0.5) = %.5f  iterations %zu\n", set.name.c_str(), fp.curve(0.5), fp.report.iterations);
    }
    io::write_text(ctx.file("figures.gp"), gnuplot_stub(sets));
}

json sweep_to_json(const std::vector<io::SweepSet>& sets) {
    json j = json::array();
    for (const auto& s : sets) j.push_back({{"name", s.name}, {"params", io::params_to_json(s.params)}});
    return j;
}

std::vector<io::SweepSet> sweep_from_json(const json& j) {
    std::vector<io::SweepSet> sets;
    for (const auto& e : j) sets.push_back({e.at("name").get<std::string>(), validate(io::params_from_json(e.at("params")))});
    return sets;
}

}  // namespace

int run(int argc, char** argv) {
    CLI::App app{"Optimal investment timing under an unobserved two-point drift"};
    app.set_version_flag("--version", STOPWELL_VERSION);
    app.require_subcommand(1);
    app.fallthrough();

    std::optional<std::uint64_t> seed_flag;
    std::string out_dir = "out";
    std::string config_path;
    std::string manifest_path;
    ModelParams model_flags = kReferenceParams;
    app.add_option("--seed", seed_flag, "Random seed (else STOPWELL_SEED, else a fixed default)");
    app.add_option("--out", out_dir, "Output directory")->capture_default_str();
    app.add_option("--config", config_path, "INI config with [model], [numerics], [sweep.<name>]");
    app.add_option("--manifest", manifest_path, "Run manifest path (default <out>/manifest.json)");
    CLI::Option* o_mu0 = app.add_option("--mu0", model_flags.mu0, "Low drift")->capture_default_str();
    CLI::Option* o_mu1 = app.add_option("--mu1", model_flags.mu1, "High drift")->capture_default_str();
    CLI::Option* o_sigma = app.add_option("--sigma", model_flags.sigma, "Volatility")->capture_default_str();
    CLI::Option* o_r = app.add_option("--rate", model_flags.r, "Discount rate r")->capture_default_str();
    CLI::Option* o_cost = app.add_option("--cost", model_flags.invest_cost, "Investment cost I")->capture_default_str();

    auto* sc_thresholds = app.add_subcommand("thresholds", "Closed-form roots, thresholds and lower bound");
    auto* sc_boundary = app.add_subcommand("boundary", "Solve the boundary by Monte-Carlo fixed-point iteration");
    auto* sc_value = app.add_subcommand("value", "Value function estimates from a boundary");
    auto* sc_voi = app.add_subcommand("voi", "Value of information on a grid");
    auto* sc_oracle = app.add_subcommand("oracle", "Finite-difference obstacle solver");
    auto* sc_verify = app.add_subcommand("verify", "Run the acceptance checks");
    auto* sc_figures = app.add_subcommand("figures", "Boundary and value-of-information data per parameter set");
    auto* sc_replay = app.add_subcommand("replay", "Re-run a manifest");

    Flags f_thresholds(sc_thresholds), f_boundary(sc_boundary), f_value(sc_value), f_voi(sc_voi),
        f_oracle(sc_oracle), f_verify(sc_verify), f_figures(sc_figures);
    BoundaryOpts thresholds_opts;
    f_thresholds.add("--m", "m", thresholds_opts.m, "Belief grid nodes for the lower-bound table");
    BoundaryOpts boundary_opts;
    boundary_opts.bind(f_boundary);
    ValueOpts value_opts;
    value_opts.bind(f_value);
    VoiOpts voi_opts;
    voi_opts.bind(f_voi);
    OracleOpts oracle_opts;
    oracle_opts.bind(f_oracle);
    VerifyOpts verify_opts;
    verify_opts.bind(f_verify);
    FiguresOpts figures_opts;
    figures_opts.bind(f_figures);
    std::string replay_path;
    sc_replay->add_option("manifest_file", replay_path, "Manifest written by an earlier run")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? kExitOk : kExitInvalid;
    }

    struct Entry {
        CLI::App* app;
        Flags* flags;
    };
    const std::vector<std::pair<std::string, Entry>> table{
        {"thresholds", {sc_thresholds, &f_thresholds}}, {"boundary", {sc_boundary, &f_boundary}},
        {"value", {sc_value, &f_value}},                {"voi", {sc_voi, &f_voi}},
        {"oracle", {sc_oracle, &f_oracle}},             {"verify", {sc_verify, &f_verify}},
        {"figures", {sc_figures, &f_figures}}};

    try {
        Context ctx;
        std::string sub;
        Flags* flags = nullptr;
        std::vector<io::SweepSet> sweep_sets;
        json replay_sweep;
        if (sc_replay->parsed()) {
            const io::RunManifest m = io::read_manifest(replay_path);
            sub = m.subcommand;
            for (auto& [name, e] : table) {
                if (name == sub) flags = e.flags;
            }
            if (!flags) throw std::invalid_argument("manifest: unknown subcommand '" + sub + "'");
            flags->apply_manifest(m.flags);
            ctx.params = validate(m.params);
            ctx.seed = m.seed;
            if (m.flags.contains("sweep_sets")) replay_sweep = m.flags.at("sweep_sets");
        } else {
            for (auto& [name, e] : table) {
                if (e.app->parsed()) {
                    sub = name;
                    flags = e.flags;
                }
            }
            if (!config_path.empty()) ctx.config = io::load_config(config_path);
            flags->apply_config(ctx.config);
            ctx.params = ctx.config.model;
            if (o_mu0->count()) ctx.params.mu0 = model_flags.mu0;
            if (o_mu1->count()) ctx.params.mu1 = model_flags.mu1;
            if (o_sigma->count()) ctx.params.sigma = model_flags.sigma;
            if (o_r->count()) ctx.params.r = model_flags.r;
            if (o_cost->count()) ctx.params.invest_cost = model_flags.invest_cost;
            validate(ctx.params);
            ctx.seed = resolve_seed(seed_flag);
        }

        ctx.out = out_dir;
        ctx.manifest_path = manifest_path.empty() ? ctx.out / "manifest.json" : fs::path(manifest_path);
        io::ensure_directory(ctx.out);
        ctx.manifest.subcommand = sub;
        ctx.manifest.params = ctx.params;
        ctx.manifest.seed = ctx.seed;
        ctx.manifest.flags = flags->to_json();

        int code = kExitOk;
        if (sub == "thresholds") {
            cmd_thresholds(ctx, thresholds_opts);
        } else if (sub == "boundary") {
            cmd_boundary(ctx, boundary_opts);
        } else if (sub == "value") {
            cmd_value(ctx, value_opts);
        } else if (sub == "voi") {
            cmd_voi(ctx, voi_opts);
        } else if (sub == "oracle") {
            cmd_oracle(ctx, oracle_opts);
        } else if (sub == "verify") {
            if (!cmd_verify(ctx, verify_opts)) code = kExitNumerical;
        } else if (sub == "figures") {
            if (!replay_sweep.is_null()) {
                sweep_sets = sweep_from_json(replay_sweep);
            } else if (!figures_opts.sweep.empty()) {
                sweep_sets = io::load_config(figures_opts.sweep).sweeps;
                if (sweep_sets.empty()) throw std::invalid_argument(figures_opts.sweep + ": no [sweep.<name>] sections");
            } else if (!ctx.config.sweeps.empty()) {
                sweep_sets = ctx.config.sweeps;
            } else {
                sweep_sets = io::default_sweep();
            }
            ctx.manifest.flags["sweep_sets"] = sweep_to_json(sweep_sets);
            cmd_figures(ctx, figures_opts, sweep_sets);
        }

        ctx.manifest.wall_time_s = std::chrono::duration<double>(Clock::now() - ctx.start).count();
        io::write_manifest(ctx.manifest_path, ctx.manifest);
        return code;
    } catch (const ValidationError& e) {
        std::cerr << "stopwell: invalid parameters: " << e.what() << '\n';
        return kExitInvalid;
    } catch (const io::IoError& e) {
        std::cerr << "stopwell: " << e.what() << '\n';
        return kExitIo;
    } catch (const fs::filesystem_error& e) {
        std::cerr << "stopwell: " << e.what() << '\n';
        return kExitIo;
    } catch (const NonConvergenceError& e) {
        std::cerr << "stopwell: " << e.what() << '\n';
        return kExitNumerical;
    } catch (const EstimateDegenerateError& e) {
        std::cerr << "stopwell: " << e.what() << '\n';
        return kExitNumerical;
    } catch (const OracleError& e) {
        std::cerr << "stopwell: " << e.what() << '\n';
        return kExitNumerical;
    } catch (const std::invalid_argument& e) {
        std::cerr << "stopwell: " << e.what() << '\n';
        return kExitInvalid;
    } catch (const std::exception& e) {
        std::cerr << "stopwell: " << e.what() << '\n';
        return kExitNumerical;
    }
}

}  // namespace stopwell::cli
