#include <benchmark/benchmark.h>

#include "codectx/bugs.hpp"
#include "codectx/synth.hpp"
#include "codectx/tasks.hpp"

using namespace codectx;

namespace {

tasks::TrainConfig small_config(std::size_t dim) {
    tasks::TrainConfig cfg;
    cfg.dim = dim;
    cfg.hidden = dim;
    cfg.epochs = 1;
    cfg.seed = 1;
    return cfg;
}

// forward pass over the whole corpus, the hot path of eval
void BM_PredictCorpus(benchmark::State& state) {
    const auto data = synth::pattern_task_corpus(4, 7);
    const auto bundle = tasks::train_task(data, tasks::Variant::None, small_config(state.range(0)));
    for (auto _ : state) benchmark::DoNotOptimize(tasks::predict_labels(bundle, data));
    state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(data.samples.size()));
}
BENCHMARK(BM_PredictCorpus)->Arg(32)->Arg(128);

void BM_TrainEpoch(benchmark::State& state) {
    const auto data = synth::pattern_task_corpus(4, 7);
    for (auto _ : state)
        benchmark::DoNotOptimize(tasks::train_task(data, tasks::Variant::Patterns, small_config(state.range(0))));
}
BENCHMARK(BM_TrainEpoch)->Arg(32)->Unit(benchmark::kMillisecond);

void BM_Featurize(benchmark::State& state) {
    std::vector<bugs::Tokens> docs;
    for (const auto& d : synth::report_corpus(60, 3)) docs.push_back(bugs::preprocess(d.text));
    const auto vocab = bugs::build_ngram_vocab(docs, 3, 2);
    for (auto _ : state)
        for (const auto& d : docs) benchmark::DoNotOptimize(bugs::featurize(d, vocab));
    state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(docs.size()));
}
BENCHMARK(BM_Featurize);

void BM_CloneScore(benchmark::State& state) {
    const auto n = static_cast<std::size_t>(state.range(0));
    Rng rng(5);
    nn::Tensor w({n}), a({n}), b({n});
    for (std::size_t k = 0; k < n; ++k) {
        w[k] = rng.normal();
        a[k] = rng.normal();
        b[k] = rng.normal();
    }
    const tasks::CloneHead head{w, 0.1, 0.5};
    for (auto _ : state) benchmark::DoNotOptimize(tasks::clone_score(a, b, head));
}
BENCHMARK(BM_CloneScore)->Arg(128);

}  // namespace
BENCHMARK_MAIN();
