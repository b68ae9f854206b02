#include <doctest.h>

#include <set>

#include "implausify/corpus.hpp"
#include "implausify/errors.hpp"
#include "support/fixtures.hpp"
#include "support/temp_dir.hpp"

using namespace implausify;
using testsupport::TempDir;
using testsupport::write_file;

TEST_CASE("load_stories parses jsonl") {
  TempDir dir;
  write_file(dir.file("stories.jsonl"),
             R"({"id":"s1","text":"Tom ran. He won!"})"
             "\n"
             R"({"id":"s2","text":"A story."})"
             "\n");
  const auto loaded = load_stories(dir.file("stories.jsonl"), StoryFormat::kJsonl);
  REQUIRE(loaded.stories.size() == 2);
  CHECK(loaded.stories[0].id == "s1");
  REQUIRE(loaded.stories[0].sentences.size() == 2);
  CHECK(loaded.stories[0].sentences[0] == TokenList{"tom", "ran"});
  CHECK(loaded.stories[0].sentences[1] == TokenList{"he", "won"});
  CHECK(loaded.skipped_empty == 0);
}

TEST_CASE("load_stories on an empty file yields an empty list") {
  TempDir dir;
  write_file(dir.file("empty.jsonl"), "");
  CHECK(load_stories(dir.file("empty.jsonl"), StoryFormat::kJsonl).stories.empty());
}

TEST_CASE("load_stories names the line of a malformed row") {
  TempDir dir;
  write_file(dir.file("bad.jsonl"),
             R"({"id":"a","text":"x."})"
             "\n"
             R"({"id":"b","text":"y."})"
             "\n"
             R"({"id":"c"})"
             "\n");
  CHECK_THROWS_WITH_AS(load_stories(dir.file("bad.jsonl"), StoryFormat::kJsonl),
                       "line 3: missing field text", ParseError);
}

TEST_CASE("load_stories skips empty stories with a count") {
  TempDir dir;
  write_file(dir.file("stories.jsonl"),
             R"({"id":"a","text":"..."})"
             "\n"
             R"({"id":"b","text":"real text."})"
             "\n");
  const auto loaded = load_stories(dir.file("stories.jsonl"), StoryFormat::kJsonl);
  CHECK(loaded.stories.size() == 1);
  CHECK(loaded.skipped_empty == 1);
}

TEST_CASE("load_stories plain format ids are line numbers") {
  TempDir dir;
  write_file(dir.file("plain.txt"), "First story here.\nSecond one.\n");
  const auto loaded = load_stories(dir.file("plain.txt"), StoryFormat::kPlain);
  REQUIRE(loaded.stories.size() == 2);
  CHECK(loaded.stories[0].id == "1");
  CHECK(loaded.stories[1].id == "2");
}

TEST_CASE("load_stories rejects missing files and duplicate ids") {
  TempDir dir;
  CHECK_THROWS_AS(load_stories(dir.file("nope.jsonl"), StoryFormat::kJsonl), IoError);
  write_file(dir.file("dup.jsonl"),
             R"({"id":"a","text":"x."})"
             "\n"
             R"({"id":"a","text":"y."})"
             "\n");
  CHECK_THROWS_AS(load_stories(dir.file("dup.jsonl"), StoryFormat::kJsonl), ParseError);
}

TEST_CASE("split_corpus honors the fraction") {
  const auto stories = testsupport::toy_corpus(10);
  const auto [lm, eval] = split_corpus(stories, 0.7, 1);
  CHECK(lm.size() == 7);
  CHECK(eval.size() == 3);

  const auto two = testsupport::toy_corpus(2);
  const auto [half_lm, half_eval] = split_corpus(two, 0.5, 1);
  CHECK(half_lm.size() == 1);
  CHECK(half_eval.size() == 1);
}

TEST_CASE("split_corpus is deterministic and rejects bad fractions") {
  const auto stories = testsupport::toy_corpus(20);
  const auto first = split_corpus(stories, 0.7, 9);
  const auto second = split_corpus(stories, 0.7, 9);
  CHECK(first.first == second.first);
  CHECK(first.second == second.second);
  CHECK_THROWS_AS(split_corpus(stories, 0.0, 1), Error);
  CHECK_THROWS_AS(split_corpus(stories, 1.0, 1), Error);
}

TEST_CASE("split_corpus is an exact partition for random sizes") {
  Rng rng(77);
  for (int trial = 0; trial < 40; ++trial) {
    const std::size_t n = rng.below(1001);
    if (n == 0) continue;  // fraction of an empty corpus is trivially empty
    const auto stories = testsupport::toy_corpus(n, rng.next_u64());
    const double fraction = 0.05 + 0.9 * rng.uniform01();
    const auto [lm, eval] = split_corpus(stories, fraction, rng.next_u64());
    CHECK(lm.size() + eval.size() == n);
    std::set<std::string> ids;
    for (const auto& s : lm) ids.insert(s.id);
    for (const auto& s : eval) ids.insert(s.id);
    CHECK(ids.size() == n);  // nothing lost, nothing duplicated
  }
}

namespace {

DatasetSplit sample_split() {
  const auto stories = testsupport::toy_corpus(3);
  DatasetSplit split;
  split.seed = 5;
  split.train.push_back(make_positive(stories[0]));
  LabeledExample negative;
  negative.text = {"a", "strange", "text", "."};
  negative.label = Label::kImplausible;
  negative.provenance = Provenance::kManPlts;
  negative.source_id = stories[0].id;
  ManipulationRecord record;
  record.technique = Technique::kRepeat;
  record.positions = {{0, 1}, {2, 0}};
  record.inserted = {"strange", "strange"};
  record.detail = "repeat item=strange copies=2";
  negative.manipulations.push_back(record);
  split.train.push_back(negative);
  split.valid.push_back(make_positive(stories[1]));
  split.test.push_back(make_positive(stories[2]));
  return split;
}

}  // namespace

TEST_CASE("dataset write/read round-trip") {
  TempDir dir;
  const DatasetSplit split = sample_split();
  write_dataset(split, dir.file("ds"));
  const DatasetSplit back = read_dataset(dir.file("ds"));
  CHECK(back == split);
}

TEST_CASE("dataset write rejects duplicate rows") {
  TempDir dir;
  DatasetSplit split = sample_split();
  split.test.push_back(split.train.front());
  CHECK_THROWS_AS(write_dataset(split, dir.file("ds")), Error);
}

TEST_CASE("empty valid partition round-trips as empty") {
  TempDir dir;
  DatasetSplit split = sample_split();
  split.valid.clear();
  write_dataset(split, dir.file("ds"));
  const DatasetSplit back = read_dataset(dir.file("ds"));
  CHECK(back.valid.empty());
  CHECK(back == split);
}

TEST_CASE("make_positive flattens sentences with dots") {
  const auto story = testsupport::make_story("x", "Tom ran. He won!");
  const auto positive = make_positive(story);
  CHECK(positive.text == TokenList{"tom", "ran", ".", "he", "won", "."});
  CHECK(positive.label == Label::kPlausible);
  CHECK(positive.provenance == Provenance::kHuman);
  CHECK(positive.manipulations.empty());
}

TEST_CASE("fraction_count rounds half up") {
  CHECK(fraction_count(0.5, 4) == 2);
  CHECK(fraction_count(0.5, 2) == 1);
  CHECK(fraction_count(0.5, 3) == 2);   // 1.5 rounds up
  CHECK(fraction_count(0.15, 20) == 3);
  CHECK(fraction_count(0.15, 3) == 0);  // 0.45 rounds down
  CHECK(fraction_count(0.7, 10) == 7);
}
