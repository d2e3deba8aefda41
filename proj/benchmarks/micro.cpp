// Microbenchmarks for the structural-analysis kernels. The model inputs
// come from the deterministic generator, so runs are comparable across
// machines and revisions.

#include "hsa/analysis.hpp"
#include "hsa/flat_oracle.hpp"
#include "hsa/generator.hpp"
#include "hsa/graph.hpp"
#include "hsa/index_reduction.hpp"
#include "hsa/model.hpp"

#include <benchmark/benchmark.h>

#include <algorithm>

namespace {

hsa::ModelRegistry hierarchical_model(int n_total, int k, double r, hsa::ModelKind kind) {
    hsa::GenParams p;
    p.k = k;
    p.n_per_component = std::max(4, n_total / (k + 1));
    p.r = r;
    p.kind = kind;
    p.seed = 11;
    return hsa::generate_model(p);
}

/// One flat incidence graph of roughly `n` nodes.
hsa::BipartiteGraph flat_graph(int n) {
    hsa::GenParams p;
    p.levels = 1;
    p.n_per_component = n;
    p.r = 0.1;
    p.seed = 11;
    hsa::ModelRegistry reg = hsa::generate_model(p);
    hsa::FlatModel flat = hsa::flatten(reg.root_def(), reg);
    std::set<hsa::VarRef> vars;
    for (const std::string& v : flat.variables) vars.insert(hsa::VarRef{v, 0});
    return hsa::build_graph(flat.equations, vars);
}

void BM_MaxMatching(benchmark::State& state) {
    hsa::BipartiteGraph g = flat_graph(static_cast<int>(state.range(0)));
    for (auto _ : state) benchmark::DoNotOptimize(hsa::max_matching(g));
    state.SetComplexityN(g.n_nodes());
}
BENCHMARK(BM_MaxMatching)->Arg(256)->Arg(1024)->Arg(4096)->Complexity();

void BM_DmDecompose(benchmark::State& state) {
    hsa::BipartiteGraph g = flat_graph(static_cast<int>(state.range(0)));
    for (auto _ : state) benchmark::DoNotOptimize(hsa::dm_decompose(g));
    state.SetComplexityN(g.n_nodes());
}
BENCHMARK(BM_DmDecompose)->Arg(256)->Arg(1024)->Arg(4096)->Complexity();

void BM_SsMatching(benchmark::State& state) {
    hsa::GenParams p;
    p.levels = 1;
    p.n_per_component = static_cast<int>(state.range(0));
    p.r = 0.1;
    p.kind = hsa::ModelKind::Dae;
    p.seed = 11;
    hsa::ModelRegistry reg = hsa::generate_model(p);
    hsa::FlatModel flat = hsa::flatten(reg.root_def(), reg);
    for (auto _ : state)
        benchmark::DoNotOptimize(hsa::ss_matching(flat.equations, flat.variables));
}
BENCHMARK(BM_SsMatching)->Arg(256)->Arg(1024);

void BM_AnalyzeFlat(benchmark::State& state) {
    hsa::ModelRegistry reg =
        hierarchical_model(static_cast<int>(state.range(0)), 8, 0.1, hsa::ModelKind::Nlae);
    hsa::AnalysisOptions opts;
    opts.collect_timings = false;
    for (auto _ : state) benchmark::DoNotOptimize(hsa::analyze_flat(reg, opts));
}
BENCHMARK(BM_AnalyzeFlat)->Arg(1024)->Arg(4096);

void BM_AnalyzeHierCold(benchmark::State& state) {
    hsa::ModelRegistry reg =
        hierarchical_model(static_cast<int>(state.range(0)), 8, 0.1, hsa::ModelKind::Nlae);
    hsa::AnalysisOptions opts;
    opts.collect_timings = false;
    for (auto _ : state) {
        hsa::DecompositionCache cache;
        benchmark::DoNotOptimize(hsa::analyze(reg, cache, opts));
    }
}
BENCHMARK(BM_AnalyzeHierCold)->Arg(1024)->Arg(4096);

void BM_AnalyzeHierWarm(benchmark::State& state) {
    hsa::ModelRegistry reg =
        hierarchical_model(static_cast<int>(state.range(0)), 8, 0.1, hsa::ModelKind::Nlae);
    hsa::AnalysisOptions opts;
    opts.collect_timings = false;
    hsa::DecompositionCache cache;
    hsa::analyze(reg, cache, opts); // fill the cache once
    for (auto _ : state) benchmark::DoNotOptimize(hsa::analyze(reg, cache, opts));
}
BENCHMARK(BM_AnalyzeHierWarm)->Arg(1024)->Arg(4096);

} // namespace

BENCHMARK_MAIN();
