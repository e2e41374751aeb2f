#include <benchmark/benchmark.h>

#include "deanon/egonet.hpp"
#include "deanon/graph.hpp"

namespace {

const deanon::Graph& test_graph(std::size_t nodes) {
    static std::map<std::size_t, deanon::Graph> cache;
    auto it = cache.find(nodes);
    if (it == cache.end()) {
        it = cache.emplace(nodes, deanon::synth_powerlaw(nodes, 6, 1234)).first;
    }
    return it->second;
}

void BM_SynthPowerlaw(benchmark::State& state) {
    for (auto _ : state) {
        auto g = deanon::synth_powerlaw(static_cast<std::size_t>(state.range(0)), 6, 42);
        benchmark::DoNotOptimize(g);
    }
    state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_SynthPowerlaw)->Range(1024, 16384)->Complexity();

void BM_TwoHopBfs(benchmark::State& state) {
    const auto& g = test_graph(static_cast<std::size_t>(state.range(0)));
    const auto nodes = g.nodes();
    std::size_t at = 0;
    for (auto _ : state) {
        auto hops = deanon::khop_neighborhood(g, nodes[at++ % nodes.size()], 2);
        benchmark::DoNotOptimize(hops);
    }
}
BENCHMARK(BM_TwoHopBfs)->Arg(4096)->Arg(16384);

void BM_ExtractEgonet(benchmark::State& state) {
    const auto& g = test_graph(16384);
    const auto nodes = g.nodes();
    std::size_t at = 0;
    for (auto _ : state) {
        auto [egonet, truth] =
            deanon::extract_egonet(g, nodes[at++ % nodes.size()], deanon::Scheme::Two, 7);
        benchmark::DoNotOptimize(egonet);
        benchmark::DoNotOptimize(truth);
    }
}
BENCHMARK(BM_ExtractEgonet);

}  // namespace
