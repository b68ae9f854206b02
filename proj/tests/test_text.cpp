#include <doctest.h>

#include "implausify/text.hpp"
#include "implausify/rng.hpp"

using namespace implausify;

TEST_CASE("tokenize lowercases and splits punctuation") {
  CHECK(tokenize("Tom ran") == TokenList{"tom", "ran"});
  CHECK(tokenize("Tom ran, fast") == TokenList{"tom", "ran", ",", "fast"});
  CHECK(tokenize("it's") == TokenList{"it", "'", "s"});
  CHECK(tokenize("  spaced   out ") == TokenList{"spaced", "out"});
  CHECK(tokenize("").empty());
}

TEST_CASE("tokenize is idempotent over joined output") {
  Rng rng(3);
  const std::vector<std::string> words = {"tom", "ran", ",", "fast", "3", ".", "store!"};
  for (int trial = 0; trial < 200; ++trial) {
    std::string text;
    const std::size_t len = 1 + rng.below(12);
    for (std::size_t i = 0; i < len; ++i) {
      text += words[rng.below(words.size())];
      text.push_back(' ');
    }
    const TokenList once = tokenize(text);
    const TokenList twice = tokenize(join_tokens(once));
    CHECK(once == twice);
  }
}

TEST_CASE("segment_sentences splits on terminators and drops them") {
  const auto sentences = segment_sentences("Tom ran. He won!");
  REQUIRE(sentences.size() == 2);
  CHECK(sentences[0] == TokenList{"tom", "ran"});
  CHECK(sentences[1] == TokenList{"he", "won"});
}

TEST_CASE("segment_sentences handles terminator runs and missing trailing dot") {
  CHECK(segment_sentences("wait... what? sure").size() == 3);
  CHECK(segment_sentences("").empty());
  CHECK(segment_sentences("!!!").empty());
  // a dot not followed by whitespace does not split
  const auto sentences = segment_sentences("version 3.5 shipped. done.");
  REQUIRE(sentences.size() == 2);
  CHECK(sentences[0] == TokenList{"version", "3", ".", "5", "shipped"});
}

TEST_CASE("is_punctuation and normalize_phrase") {
  CHECK(is_punctuation("."));
  CHECK(is_punctuation("!?"));
  CHECK_FALSE(is_punctuation("a."));
  CHECK_FALSE(is_punctuation(""));
  CHECK(normalize_phrase("  Get   Pay ") == "get pay");
  CHECK(normalize_phrase("WORK") == "work");
}

TEST_CASE("stable_hash64 is fixed across runs") {
  // frozen value guards accidental hash changes, which would break
  // reproducibility of seeded outputs
  CHECK(stable_hash64("work") == stable_hash64("work"));
  CHECK(stable_hash64("work") != stable_hash64("walk"));
  CHECK(stable_hash64("") == 0xcbf29ce484222325ULL);
}
