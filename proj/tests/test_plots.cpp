#include <doctest.h>

#include <algorithm>

#include "implausify/plots.hpp"
#include "support/fixtures.hpp"

using namespace implausify;
using testsupport::make_story;

namespace {
const std::unordered_set<std::string> kNoVerbs;
}

TEST_CASE("storyline keywords follow degree/frequency scores") {
  // phrases: [tom ran], [store]; scores tom=2, ran=2, store=1
  const auto story = make_story("s", "tom ran to the store.");
  const auto plot = extract_storyline(story, 2, {"to", "the"}, kNoVerbs);
  REQUIRE(plot.lines.size() == 1);
  REQUIRE(plot.lines[0].size() == 2);
  CHECK(plot.lines[0][0].surface == "tom");
  CHECK(plot.lines[0][1].surface == "ran");
  CHECK(plot.lines[0][0].kind == PlotItemKind::kKeyword);
}

TEST_CASE("storyline degree spans the whole story") {
  // phrases: [tom ran], [store], [tom ran home]
  // scores: tom 5/2, ran 5/2, store 1, home 3
  const auto story = make_story("s", "tom ran to the store. tom ran home.");
  const auto plot = extract_storyline(story, 2, {"to", "the"}, kNoVerbs);
  REQUIRE(plot.lines.size() == 2);
  REQUIRE(plot.lines[1].size() == 2);
  // home (3.0) and tom (2.5, earlier than ran) win; emitted in sentence order
  CHECK(plot.lines[1][0].surface == "tom");
  CHECK(plot.lines[1][1].surface == "home");
}

TEST_CASE("storyline single word and all-stopword sentences") {
  const auto hello = make_story("s", "hello .");
  const auto plot = extract_storyline(hello, 1, {}, kNoVerbs);
  REQUIRE(plot.lines.size() == 1);
  REQUIRE(plot.lines[0].size() == 1);
  CHECK(plot.lines[0][0].surface == "hello");

  const auto stops = make_story("s", "to the. tom ran.");
  const auto plot2 = extract_storyline(stops, 2, {"to", "the"}, kNoVerbs);
  REQUIRE(plot2.lines.size() == 2);
  CHECK(plot2.lines[0].empty());
  CHECK(plot2.lines[1].size() == 2);
}

TEST_CASE("storyline marks verb-lexicon tokens") {
  const auto story = make_story("s", "tom worked the piano.");
  const auto plot = extract_storyline(story, 3, {"the"}, {"worked"});
  REQUIRE(plot.lines.size() == 1);
  bool found_verb = false;
  for (const auto& item : plot.lines[0]) {
    if (item.surface == "worked") {
      found_verb = true;
      CHECK(item.kind == PlotItemKind::kVerb);
    }
  }
  CHECK(found_verb);
}

TEST_CASE("storyline structural invariants on random stories") {
  const auto stories = testsupport::toy_corpus(50);
  for (const auto& story : stories) {
    const auto plot = extract_storyline(story, 2, default_stopwords(), {"worked", "baked"});
    CHECK(plot.lines.size() == story.sentences.size());
    for (std::size_t l = 0; l < plot.lines.size(); ++l) {
      for (const auto& item : plot.lines[l]) {
        CHECK(item.sentence_index == static_cast<int>(l));
        const auto& sentence = story.sentences[l];
        CHECK(std::find(sentence.begin(), sentence.end(), item.surface) != sentence.end());
      }
    }
    // determinism
    CHECK(plot == extract_storyline(story, 2, default_stopwords(), {"worked", "baked"}));
  }
}

TEST_CASE("verbarg plot emits verbs with their first argument") {
  const auto story = make_story("s", "jake decided to clean the floor. jake slept well.");
  const auto plot =
      extract_verbarg_plot(story, {"decided", "clean"}, default_stopwords(), 1);
  REQUIRE(plot.lines.size() == 2);
  REQUIRE(plot.lines[0].size() == 3);
  CHECK(plot.lines[0][0].surface == "decided");
  CHECK(plot.lines[0][0].kind == PlotItemKind::kVerb);
  CHECK(plot.lines[0][1].surface == "clean");
  CHECK(plot.lines[0][1].kind == PlotItemKind::kVerb);
  CHECK(plot.lines[0][2].surface == "floor");
  CHECK(plot.lines[0][2].kind == PlotItemKind::kKeyword);
  // second sentence has no lexicon verb: falls back to storyline keywords
  CHECK(plot.lines[1].size() == 1);
}

TEST_CASE("verbarg line count always matches sentence count") {
  const auto stories = testsupport::toy_corpus(30);
  for (const auto& story : stories) {
    const auto plot = extract_verbarg_plot(story, {"worked", "walked"}, default_stopwords(), 3);
    CHECK(plot.lines.size() == story.sentences.size());
  }
}
