#include <benchmark/benchmark.h>

#include "featlab/batch.hpp"
#include "featlab/datasets.hpp"
#include "featlab/deep_linear.hpp"
#include "featlab/model.hpp"
#include "featlab/rng.hpp"
#include "featlab/training.hpp"

using namespace featlab;

namespace {

struct Fixture {
    Corpus corpus;
    ModelParams params;
    TrainMultiset multiset;
    Batch batch;

    Fixture(std::size_t N, std::size_t dim, std::size_t m) {
        Rng rc(1), rp(2);
        corpus = build_analogical(N, dim, rc);
        params = init_params(dim, m, 20.0, 0.03, rp);
        multiset = assemble_train(corpus, Recipe::joint_analogical, 3);
        batch = make_batch(corpus, multiset);
    }
};

// args: N, d (m fixed at 50)
void BM_GdStepIdentity(benchmark::State& state) {
    Fixture fx(state.range(0), state.range(1), 50);
    for (auto _ : state) {
        auto next = gd_step(fx.params, fx.batch, kAllGroups, 0.1, Activation::identity);
        benchmark::DoNotOptimize(next.W.data());
    }
    state.SetItemsProcessed(state.iterations() * fx.batch.count());
}
BENCHMARK(BM_GdStepIdentity)->Args({20, 64})->Args({50, 200})->Args({100, 427})->Unit(benchmark::kMillisecond);

void BM_GdStepRelu(benchmark::State& state) {
    Fixture fx(state.range(0), state.range(1), state.range(2));
    for (auto _ : state) {
        auto next = gd_step(fx.params, fx.batch, kAllGroups, 0.1, Activation::relu);
        benchmark::DoNotOptimize(next.W.data());
    }
}
BENCHMARK(BM_GdStepRelu)->Args({20, 64, 5})->Args({100, 427, 5})->Unit(benchmark::kMillisecond);

void BM_TrainLoss(benchmark::State& state) {
    Fixture fx(100, 427, 50);
    for (auto _ : state) benchmark::DoNotOptimize(train_loss(fx.params, fx.corpus, fx.multiset, Activation::identity));
}
BENCHMARK(BM_TrainLoss)->Unit(benchmark::kMillisecond);

void BM_SinglePromptForward(benchmark::State& state) {
    Fixture fx(100, 427, 50);
    const Prompt prompt = fx.corpus.prompt(fx.corpus.test_set[0]);
    for (auto _ : state) benchmark::DoNotOptimize(predict(fx.params, prompt, Activation::identity));
}
BENCHMARK(BM_SinglePromptForward);

void BM_LayerwiseLinear(benchmark::State& state) {
    LayerwiseConfig config;
    config.dim = state.range(0);
    for (auto _ : state) {
        Rng rng(3);
        auto r = train_layerwise_linear(config, rng);
        benchmark::DoNotOptimize(r);
    }
}
BENCHMARK(BM_LayerwiseLinear)->Arg(128)->Arg(512)->Unit(benchmark::kMillisecond);

}  // namespace
BENCHMARK_MAIN();
