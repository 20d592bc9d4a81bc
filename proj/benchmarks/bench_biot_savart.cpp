#include <benchmark/benchmark.h>

#include "growthflow/biot_savart.hpp"
#include "growthflow/fields.hpp"
#include "growthflow/flow.hpp"
#include "growthflow/kernel.hpp"

using namespace growthflow;

static void BM_DirectSummation(benchmark::State& state) {
    const VortexParticleField f = make_rankine(1.0, 1.0, static_cast<int>(state.range(0)));
    const SourceCloud src = SourceCloud::from(f);
    std::vector<Vec2> out(f.size());
    for (auto _ : state) {
        velocity_direct(src, f.positions, out);
        benchmark::DoNotOptimize(out.data());
    }
    state.counters["pairs/s"] = benchmark::Counter(static_cast<double>(f.size() * f.size()),
                                                   benchmark::Counter::kIsIterationInvariantRate);
}
BENCHMARK(BM_DirectSummation)->Arg(32)->Arg(64)->Arg(128)->Unit(benchmark::kMillisecond);

static void BM_CutoffVelocity(benchmark::State& state) {
    const SourceCloud src = SourceCloud::from(make_kirchhoff(2.0, 1.0, 1.0, 64));
    const CutoffKernel k(1.0);
    for (auto _ : state) benchmark::DoNotOptimize(cutoff_velocity_at(src, k, {0.3, 0.2}));
}
BENCHMARK(BM_CutoffVelocity);

static void BM_RK4Step(benchmark::State& state) {
    const VortexParticleField f = make_rankine(1.0, 1.0, static_cast<int>(state.range(0)));
    for (auto _ : state) {
        ParticleSystem sys(f.positions, 0, f.omega, f.areas);
        sys.step(0.01);
        benchmark::DoNotOptimize(sys.positions().data());
    }
}
BENCHMARK(BM_RK4Step)->Arg(32)->Arg(64)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
