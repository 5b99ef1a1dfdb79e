// SPDX-License-Identifier: Apache-2.0
//
// Serial reference kernel vs the OpenMP angle sweep.

#include "dynmod/analysis.hpp"

#include <benchmark/benchmark.h>

using namespace dynmod;

namespace {

struct fixture {
    dynamic_antenna antenna = synth_linear_phase_divergence(33.33 / 30.0, 90.0, angle_grid::uniform(0, 180, 0.5));
    angle_grid grid = angle_grid::uniform(0, 180, 0.5);
    channel_config channel{12.0, 7, 90.0};
};

const fixture& shared()
{
    static const fixture f;
    return f;
}

void bm_serial(benchmark::State& state)
{
    const auto& f = shared();
    const auto map = build_constellation(modulation_scheme::qam, static_cast<int>(state.range(0)));
    for (auto _ : state) {
        auto r = sweep_ber_serial(f.antenna, switch_schedule::alternating(), map, f.channel, f.grid, 10000);
        benchmark::DoNotOptimize(r.ber.data());
    }
    state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations() * f.grid.size()));
}

void bm_parallel(benchmark::State& state)
{
    const auto& f = shared();
    const auto map = build_constellation(modulation_scheme::qam, static_cast<int>(state.range(0)));
    sweep_options opt;
    opt.threads = static_cast<int>(state.range(1));
    for (auto _ : state) {
        auto r = sweep_ber(f.antenna, switch_schedule::alternating(), map, f.channel, f.grid, 10000, opt);
        benchmark::DoNotOptimize(r.ber.data());
    }
    state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations() * f.grid.size()));
}

} // namespace

BENCHMARK(bm_serial)->Arg(16)->Arg(256)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(bm_parallel)
    ->ArgsProduct({{16, 256}, {1, 2, 4, 0}})
    ->ArgNames({"M", "threads"})
    ->Unit(benchmark::kMillisecond)
    ->UseRealTime();

BENCHMARK_MAIN();
