// Processing-task benchmarks over the built-in spaces: correction of
// invalid points, full enumeration, valid-point generation and Gram
// assembly.

#include <benchmark/benchmark.h>

#include "hdsg/gp.hpp"
#include "hdsg/kernel.hpp"
#include "hdsg/problems.hpp"
#include "hdsg/rng.hpp"

using namespace hdsg;

namespace {

RawPoint random_raw(const DesignSpaceGraph& g, CounterRng& rng) {
    RawPoint raw;
    for (std::size_t i = 0; i < g.size(); ++i) {
        if (g.is_intermediate(i)) continue;
        const Domain& dom = g.variable(i).domain;
        if (dom.type == VarType::Continuous)
            raw[g.variable(i).name] = rng.uniform(dom.bounds.lo, dom.bounds.hi);
        else
            raw[g.variable(i).name] = dom.level_value(rng.below(dom.level_count()));
    }
    return raw;
}

void BM_CorrectInvalidPoints(benchmark::State& state) {
    const auto g = get_problem("mlp").graph;
    CounterRng rng(1);
    std::vector<RawPoint> raws;
    for (int i = 0; i < 1000; ++i) raws.push_back(random_raw(*g, rng));
    for (auto _ : state) {
        for (const auto& raw : raws) benchmark::DoNotOptimize(correct(*g, raw));
    }
    state.SetItemsProcessed(state.iterations() * 1000);
}
BENCHMARK(BM_CorrectInvalidPoints)->Unit(benchmark::kMillisecond);

void BM_EnumerateDiscrete(benchmark::State& state) {
    const auto g = get_problem("mlp").graph;
    for (auto _ : state) benchmark::DoNotOptimize(enumerate_discrete(*g));
}
BENCHMARK(BM_EnumerateDiscrete)->Unit(benchmark::kMillisecond);

void BM_OnePointPerConfiguration(benchmark::State& state) {
    const auto g = get_problem("mlp").graph;
    const auto n = enumerate_discrete(*g).size();
    for (auto _ : state) benchmark::DoNotOptimize(sample_valid(*g, n, 7));
    state.SetItemsProcessed(state.iterations() * static_cast<long>(n));
}
BENCHMARK(BM_OnePointPerConfiguration)->Unit(benchmark::kMillisecond);

void BM_Sample100Valid(benchmark::State& state) {
    const auto g = get_problem("mlp").graph;
    for (auto _ : state) benchmark::DoNotOptimize(sample_valid(*g, 100, 7));
}
BENCHMARK(BM_Sample100Valid)->Unit(benchmark::kMillisecond);

void BM_GramHier(benchmark::State& state) {
    const auto g = get_problem("dragon_lite").graph;
    const auto pts = sample_valid(*g, static_cast<std::size_t>(state.range(0)), 3);
    const Kernel kernel(*g, KernelHyperparams::defaults(*g, KernelKind::Hier));
    for (auto _ : state) benchmark::DoNotOptimize(kernel.gram(pts));
}
BENCHMARK(BM_GramHier)->Arg(20)->Arg(60)->Unit(benchmark::kMicrosecond);

void BM_FitHier(benchmark::State& state) {
    const ProblemSpec problem = get_problem("dragon_lite");
    Dataset data;
    data.points = sample_valid(*problem.graph, 30, 5);
    for (const auto& p : data.points) data.targets.push_back(evaluate(problem, p));
    for (auto _ : state) benchmark::DoNotOptimize(fit(problem.graph, data, KernelKind::Hier));
}
BENCHMARK(BM_FitHier)->Unit(benchmark::kMillisecond);

} // namespace

BENCHMARK_MAIN();
