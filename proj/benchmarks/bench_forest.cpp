#include <benchmark/benchmark.h>

#include "deanon/forest.hpp"
#include "deanon/rng.hpp"

namespace {

using deanon::FeatureVector;
using deanon::PairLabel;
using deanon::PairSample;

std::vector<PairSample> synthetic_pool(std::size_t count, PairLabel label, std::uint64_t seed) {
    deanon::Rng rng(seed);
    std::vector<PairSample> pool(count);
    for (PairSample& s : pool) {
        s.label = label;
        s.vec_a.bins.resize(70);
        s.vec_b.bins.resize(70);
        for (std::size_t k = 0; k < 70; ++k) {
            s.vec_a.bins[k] = static_cast<std::uint32_t>(rng.below(40));
            s.vec_b.bins[k] = label == PairLabel::Identical
                                  ? s.vec_a.bins[k] + static_cast<std::uint32_t>(rng.below(3))
                                  : static_cast<std::uint32_t>(rng.below(40));
        }
    }
    return pool;
}

void BM_TrainTree(benchmark::State& state) {
    auto identical = synthetic_pool(600, PairLabel::Identical, 1);
    auto non_identical = synthetic_pool(600, PairLabel::NonIdentical, 2);
    deanon::ForestParams params;
    params.tree_count = 1;
    for (auto _ : state) {
        auto forest = deanon::train_forest(identical, non_identical, params, 7);
        benchmark::DoNotOptimize(forest);
    }
}
BENCHMARK(BM_TrainTree)->Unit(benchmark::kMillisecond);

void BM_PredictForest(benchmark::State& state) {
    auto identical = synthetic_pool(600, PairLabel::Identical, 1);
    auto non_identical = synthetic_pool(600, PairLabel::NonIdentical, 2);
    deanon::ForestParams params;
    params.tree_count = 50;
    auto forest = deanon::train_forest(identical, non_identical, params, 7, 2);
    std::size_t at = 0;
    for (auto _ : state) {
        const PairSample& s = non_identical[at++ % non_identical.size()];
        benchmark::DoNotOptimize(deanon::predict_forest(forest, s.vec_a, s.vec_b));
    }
}
BENCHMARK(BM_PredictForest);

}  // namespace
