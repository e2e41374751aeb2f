#include <benchmark/benchmark.h>

#include "deanon/features.hpp"
#include "deanon/graph.hpp"

namespace {

void BM_DegreeHistogram(benchmark::State& state) {
    auto g = deanon::synth_powerlaw(16384, 6, 99);
    const auto nodes = g.nodes();
    std::size_t at = 0;
    for (auto _ : state) {
        auto vec = deanon::degree_histogram_vector(g, nodes[at++ % nodes.size()], 70, 15);
        benchmark::DoNotOptimize(vec);
    }
}
BENCHMARK(BM_DegreeHistogram);

void BM_DualHopVector(benchmark::State& state) {
    auto g = deanon::synth_powerlaw(8192, 6, 99);
    const auto nodes = g.nodes();
    std::size_t at = 0;
    for (auto _ : state) {
        auto vec = deanon::dual_hop_vector(g, nodes[at++ % nodes.size()], 70, 15);
        benchmark::DoNotOptimize(vec);
    }
}
BENCHMARK(BM_DualHopVector);

}  // namespace
