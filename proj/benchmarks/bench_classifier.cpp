#include <benchmark/benchmark.h>

#include "implausify/classifier.hpp"
#include "implausify/rng.hpp"

namespace {

std::vector<implausify::TokenList> random_texts(std::size_t count, std::size_t length,
                                                std::uint64_t seed) {
  implausify::Rng rng(seed);
  std::vector<implausify::TokenList> texts(count);
  for (auto& text : texts) {
    for (std::size_t i = 0; i < length; ++i)
      text.push_back("w" + std::to_string(rng.below(2000)));
  }
  return texts;
}

void BM_Featurize(benchmark::State& state) {
  const auto texts = random_texts(64, static_cast<std::size_t>(state.range(0)), 3);
  implausify::FeatureConfig cfg;
  std::size_t i = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(implausify::featurize(texts[i++ % texts.size()], cfg));
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_Featurize)->Arg(50)->Arg(200)->Arg(1000);

void BM_TrainClassifier(benchmark::State& state) {
  const auto positives = random_texts(static_cast<std::size_t>(state.range(0)), 40, 1);
  const auto negatives = random_texts(static_cast<std::size_t>(state.range(0)), 40, 2);
  implausify::FeatureConfig cfg;
  cfg.hash_dims = 1 << 18;
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        implausify::train_classifier(positives, negatives, cfg, 10, 0.1, 42));
  }
}
BENCHMARK(BM_TrainClassifier)->Arg(100)->Arg(400)->Unit(benchmark::kMillisecond);

}  // namespace
