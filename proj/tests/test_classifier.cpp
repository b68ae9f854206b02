#include <doctest.h>

#include <cmath>
#include <set>

#include "implausify/classifier.hpp"
#include "implausify/errors.hpp"
#include "implausify/rng.hpp"
#include "support/temp_dir.hpp"

using namespace implausify;

namespace {

FeatureConfig small_config() {
  FeatureConfig cfg;
  cfg.hash_dims = 1 << 12;
  return cfg;
}

/// Linearly separable toy set: positives mention "good", negatives "bad".
std::pair<std::vector<TokenList>, std::vector<TokenList>> separable_fixture() {
  std::vector<TokenList> positives, negatives;
  Rng rng(17);
  const std::vector<std::string> filler = {"story", "day", "walk", "tree", "house", "friend"};
  for (int i = 0; i < 30; ++i) {
    TokenList pos{"a", "good", filler[rng.below(filler.size())], "."};
    TokenList neg{"a", "bad", filler[rng.below(filler.size())], "."};
    positives.push_back(std::move(pos));
    negatives.push_back(std::move(neg));
  }
  return {positives, negatives};
}

}  // namespace

TEST_CASE("featurize is deterministic and rejects empty text") {
  const TokenList text{"tom", "ran", "to", "the", "store", "."};
  const auto a = featurize(text, small_config());
  const auto b = featurize(text, small_config());
  CHECK(a.entries == b.entries);
  CHECK_THROWS_AS(featurize({}, small_config()), Error);

  FeatureConfig bad;
  bad.hash_dims = 100;  // not a power of two
  CHECK_THROWS_AS(featurize(text, bad), Error);
}

TEST_CASE("style features count repeated bigrams by hand") {
  const TokenList text{"a", "a", "a", "a"};
  const StyleFeatures style = style_features(text);
  CHECK(style.max_repeated_bigram == 3);  // "a a" occurs 3 times
  CHECK(style.length == 4);
  CHECK(style.type_token_ratio == doctest::Approx(0.25));

  const TokenList story{"tom", "ran", ".", "he", "won", "today", "."};
  const StyleFeatures s2 = style_features(story);
  CHECK(s2.mean_sentence_length == doctest::Approx(2.5));  // (2 + 3) / 2
}

TEST_CASE("hash collisions are rare at 2^20 dims") {
  FeatureConfig cfg;
  cfg.hash_dims = 1 << 20;
  cfg.use_word_bigrams = false;
  cfg.use_style = false;
  std::set<int> seen;
  int collisions = 0;
  const int types = 10000;
  for (int i = 0; i < types; ++i) {
    const auto vec = featurize(TokenList{"tok" + std::to_string(i)}, cfg);
    REQUIRE(vec.entries.size() == 1);
    if (!seen.insert(vec.entries[0].first).second) ++collisions;
  }
  CHECK(static_cast<double>(collisions) / types < 0.01);
}

TEST_CASE("training separates the separable fixture") {
  const auto [positives, negatives] = separable_fixture();
  const LinearModel model = train_classifier(positives, negatives, small_config(), 50, 0.1, 3);
  CHECK(accuracy(model, positives, negatives) == 1.0);
  // every positive outscores every negative
  double min_pos = 1.0, max_neg = 0.0;
  for (const auto& text : positives) min_pos = std::min(min_pos, score(model, text));
  for (const auto& text : negatives) max_neg = std::max(max_neg, score(model, text));
  CHECK(min_pos > max_neg);
}

TEST_CASE("identical positive and negative text scores near one half") {
  const TokenList text{"same", "text", "."};
  const LinearModel model = train_classifier(std::vector<TokenList>{text},
                                             std::vector<TokenList>{text}, small_config(), 50,
                                             0.1, 3);
  CHECK(score(model, text) == doctest::Approx(0.5).epsilon(0.05));
}

TEST_CASE("training is bitwise deterministic under a seed") {
  const auto [positives, negatives] = separable_fixture();
  const LinearModel a = train_classifier(positives, negatives, small_config(), 10, 0.1, 42);
  const LinearModel b = train_classifier(positives, negatives, small_config(), 10, 0.1, 42);
  CHECK(a.weights == b.weights);
  CHECK(a.bias == b.bias);
  const LinearModel c = train_classifier(positives, negatives, small_config(), 10, 0.1, 43);
  CHECK(a.weights != c.weights);
}

TEST_CASE("train rejects an empty class") {
  const auto [positives, negatives] = separable_fixture();
  CHECK_THROWS_AS(train_classifier({}, negatives, small_config(), 5, 0.1, 1), Error);
  CHECK_THROWS_AS(train_classifier(positives, {}, small_config(), 5, 0.1, 1), Error);
}

TEST_CASE("zero-weight model scores one half everywhere") {
  LinearModel model;
  model.config = small_config();
  model.weights.assign(static_cast<std::size_t>(model.config.hash_dims + kStyleDims), 0.0);
  CHECK(score(model, TokenList{"anything", "at", "all"}) == 0.5);
  CHECK(score(model, TokenList{"other"}) == 0.5);
}

TEST_CASE("scaling weights preserves ordering and sharpens scores") {
  const auto [positives, negatives] = separable_fixture();
  LinearModel model = train_classifier(positives, negatives, small_config(), 10, 0.1, 7);
  LinearModel doubled = model;
  for (auto& w : doubled.weights) w *= 2.0;
  doubled.bias *= 2.0;

  const TokenList sample_pos = positives.front();
  const TokenList sample_neg = negatives.front();
  const double p1 = score(model, sample_pos), p2 = score(doubled, sample_pos);
  const double n1 = score(model, sample_neg), n2 = score(doubled, sample_neg);
  CHECK(std::abs(p2 - 0.5) >= std::abs(p1 - 0.5));
  CHECK(std::abs(n2 - 0.5) >= std::abs(n1 - 0.5));
  CHECK(((p1 > n1) == (p2 > n2)));
}

TEST_CASE("analytic gradient matches central finite differences") {
  Rng rng(99);
  for (int instance = 0; instance < 50; ++instance) {
    constexpr int kDims = 1 << 10;
    LinearModel model;
    model.config.hash_dims = kDims;
    model.weights.assign(kDims + kStyleDims, 0.0);
    SparseVec features;
    const int active = 2 + static_cast<int>(rng.below(6));
    std::set<int> used;
    for (int k = 0; k < active; ++k) {
      const int index = static_cast<int>(rng.below(kDims));
      if (!used.insert(index).second) continue;
      features.entries.emplace_back(index, rng.uniform01() * 4.0 - 2.0);
    }
    std::sort(features.entries.begin(), features.entries.end());
    for (auto& [index, _] : features.entries)
      model.weights[static_cast<std::size_t>(index)] = rng.uniform01() * 2.0 - 1.0;
    model.bias = rng.uniform01() - 0.5;
    const int label = rng.below(2) == 0 ? 0 : 1;

    const auto analytic = logistic_gradient(model, features, label);
    const double eps = 1e-6;
    for (const auto& [index, _] : features.entries) {
      LinearModel plus = model, minus = model;
      plus.weights[static_cast<std::size_t>(index)] += eps;
      minus.weights[static_cast<std::size_t>(index)] -= eps;
      const double numeric =
          (logistic_loss(plus, features, label) - logistic_loss(minus, features, label)) /
          (2 * eps);
      const double denom = std::max(std::abs(numeric), std::abs(analytic[static_cast<std::size_t>(index)]));
      if (denom < 1e-10) continue;
      CHECK(std::abs(numeric - analytic[static_cast<std::size_t>(index)]) / denom < 1e-5);
    }
    LinearModel plus = model, minus = model;
    plus.bias += eps;
    minus.bias -= eps;
    const double numeric_bias =
        (logistic_loss(plus, features, label) - logistic_loss(minus, features, label)) / (2 * eps);
    const double denom = std::max(std::abs(numeric_bias), std::abs(analytic.back()));
    if (denom > 1e-10)
      CHECK(std::abs(numeric_bias - analytic.back()) / denom < 1e-5);
  }
}

TEST_CASE("model save/load round-trip preserves scores exactly") {
  testsupport::TempDir dir;
  const auto [positives, negatives] = separable_fixture();
  const LinearModel model = train_classifier(positives, negatives, small_config(), 10, 0.1, 5);
  save_model(model, dir.file("model.json"));
  const LinearModel loaded = load_model(dir.file("model.json"));
  CHECK(loaded.weights == model.weights);
  CHECK(loaded.bias == model.bias);
  CHECK(loaded.config == model.config);
  for (const auto& text : positives) CHECK(score(loaded, text) == score(model, text));
}

TEST_CASE("scores always land strictly inside (0, 1)") {
  LinearModel model;
  model.config = small_config();
  model.weights.assign(static_cast<std::size_t>(model.config.hash_dims + kStyleDims), 0.0);
  model.bias = 1000.0;  // saturates the sigmoid
  const double high = score(model, TokenList{"x"});
  CHECK(high < 1.0);
  model.bias = -1000.0;
  const double low = score(model, TokenList{"x"});
  CHECK(low > 0.0);
}
