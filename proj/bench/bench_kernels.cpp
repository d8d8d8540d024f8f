// Serial reference kernels against their OpenMP counterparts.
#include "stopwell/boundary.hpp"
#include "stopwell/pde_oracle.hpp"
#include "stopwell/valuation.hpp"

#include <benchmark/benchmark.h>

using namespace stopwell;

namespace {

Exec exec_of(const benchmark::State& st) { return st.range(0) == 0 ? Exec::serial : Exec::parallel; }

void BM_IntegralResidual(benchmark::State& st) {
    const ModelParams p;
    const auto curve = BoundaryCurve::lower_bound(make_pack(p), 101);
    for (auto _ : st) {
        benchmark::DoNotOptimize(integral_residual(p, curve, 0.5, 200'000, RngStream{1, 1}, exec_of(st)));
    }
    st.SetItemsProcessed(st.iterations() * 200'000);
}
BENCHMARK(BM_IntegralResidual)->Arg(0)->Arg(1)->ArgName("parallel")->Unit(benchmark::kMillisecond);

void BM_ValueSlice(benchmark::State& st) {
    const ModelParams p;
    const auto curve = BoundaryCurve::lower_bound(make_pack(p), 101);
    std::vector<double> xs;
    for (int j = 1; j <= 50; ++j) xs.push_back(0.2 * j);
    for (auto _ : st) benchmark::DoNotOptimize(value_slice(p, curve, xs, 0.5, 100'000, RngStream{2, 2}, exec_of(st)));
    st.SetItemsProcessed(st.iterations() * 100'000);
}
BENCHMARK(BM_ValueSlice)->Arg(0)->Arg(1)->ArgName("parallel")->Unit(benchmark::kMillisecond);

void BM_Psor(benchmark::State& st) {
    ObstacleOptions o;
    o.order = st.range(0) == 0 ? SweepOrder::lexicographic : SweepOrder::row_red_black;
    for (auto _ : st) benchmark::DoNotOptimize(solve_obstacle(kReferenceParams, {201, 51, 4.0, 1.0}, o));
}
BENCHMARK(BM_Psor)->Arg(0)->Arg(1)->ArgName("red_black")->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
