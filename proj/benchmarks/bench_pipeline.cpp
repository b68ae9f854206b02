#include <benchmark/benchmark.h>

#include "implausify/af.hpp"
#include "implausify/plot_manip.hpp"
#include "implausify/plots.hpp"
#include "implausify/realize.hpp"
#include "implausify/rng.hpp"

namespace {

using namespace implausify;

std::vector<Story> synthetic_stories(std::size_t count) {
  Rng rng(99);
  const std::vector<std::string> nouns = {"river", "piano", "garden", "ticket", "engine",
                                          "ladder", "basket", "signal"};
  const std::vector<std::string> verbs = {"carried", "opened", "painted", "watched", "fixed"};
  std::vector<Story> stories(count);
  for (std::size_t i = 0; i < count; ++i) {
    std::string text;
    for (int s = 0; s < 5; ++s)
      text += "the " + rng.pick(nouns) + " " + rng.pick(verbs) + " a " + rng.pick(nouns) + ". ";
    stories[i].id = "b" + std::to_string(i);
    stories[i].sentences = segment_sentences(text);
    stories[i].raw = std::move(text);
  }
  return stories;
}

void BM_ExtractStoryline(benchmark::State& state) {
  const auto stories = synthetic_stories(static_cast<std::size_t>(state.range(0)));
  const std::unordered_set<std::string> verbs = {"carried", "opened", "painted", "watched",
                                                 "fixed"};
  for (auto _ : state) {
    for (const auto& story : stories)
      benchmark::DoNotOptimize(extract_storyline(story, 2, default_stopwords(), verbs));
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_ExtractStoryline)->Arg(100)->Arg(1000);

void BM_ComposeAndRealize(benchmark::State& state) {
  const auto stories = synthetic_stories(64);
  TripleStore store;
  store.insert("carried", Relation::kCauses, "arrive");
  store.insert("opened", Relation::kHasPrerequisite, "unlock");
  store.insert("river", Relation::kAntonym, "desert");
  std::vector<Plot> pool;
  const std::unordered_set<std::string> verbs = {"carried", "opened", "painted", "watched",
                                                 "fixed"};
  for (const auto& story : stories)
    pool.push_back(extract_storyline(story, 2, default_stopwords(), verbs));
  const NGramModel model = NGramModel::train(stories, 3);
  GenConfig cfg;
  std::uint64_t seed = 0;
  for (auto _ : state) {
    Rng rng(seed++);
    const auto mplot = compose_manipulations(pool[seed % pool.size()], store, pool, rng, {});
    cfg.seed = seed;
    benchmark::DoNotOptimize(realize_ngram(mplot, model, cfg));
  }
}
BENCHMARK(BM_ComposeAndRealize);

void BM_AfIteration(benchmark::State& state) {
  const auto stories = synthetic_stories(static_cast<std::size_t>(state.range(0)));
  Rng rng(5);
  std::vector<CandidateSet> sets;
  for (const auto& story : stories) {
    CandidateSet set;
    set.source_id = story.id;
    set.positive_text = flatten_story(story.sentences);
    set.n = 6;
    for (int k = 0; k < 6; ++k) {
      TokenList candidate = set.positive_text;
      if (k % 2 == 0) rng.shuffle(candidate);
      else candidate[rng.below(candidate.size())] = "noise";
      set.candidates.push_back(std::move(candidate));
    }
    sets.push_back(std::move(set));
  }
  AFConfig cfg;
  cfg.features.hash_dims = 1 << 16;
  cfg.epochs = 10;
  std::uint64_t seed = 0;
  for (auto _ : state) {
    Assignment assignment = af_init(sets, 3, seed++);
    Rng iter_rng(seed);
    benchmark::DoNotOptimize(af_iteration(assignment, sets, cfg, iter_rng, 0));
  }
}
BENCHMARK(BM_AfIteration)->Arg(100)->Arg(400)->Unit(benchmark::kMillisecond);

}  // namespace
