#pragma once

#include <fstream>
#include <string>
#include <vector>

#include "implausify/corpus.hpp"
#include "implausify/kb.hpp"
#include "implausify/rng.hpp"

namespace testsupport {

inline implausify::Story make_story(std::string id, const std::string& text) {
  implausify::Story story;
  story.id = std::move(id);
  story.sentences = implausify::segment_sentences(text);
  story.raw = text;
  return story;
}

/// Small relation store used across manipulation tests.
inline implausify::TripleStore basic_store() {
  implausify::TripleStore store;
  store.insert("work", implausify::Relation::kCauses, "get pay");
  store.insert("bake", implausify::Relation::kHasPrerequisite, "buy flour");
  store.insert("walk", implausify::Relation::kHasFirstSubevent, "stand up");
  store.insert("clean", implausify::Relation::kHasLastSubevent, "rest");
  store.insert("packed", implausify::Relation::kAntonym, "unpacked");
  store.insert("wallet", implausify::Relation::kAntonym, "purse");
  store.insert("suddenly", implausify::Relation::kAntonym, "unsuddenly");
  store.insert("happy", implausify::Relation::kNotDesires, "sad");
  return store;
}

/// Deterministic synthetic corpus of simple 4-sentence stories.
inline std::vector<implausify::Story> toy_corpus(std::size_t count, std::uint64_t seed = 11) {
  static const std::vector<std::string> subjects = {"tom",  "anna", "billy", "gina",
                                                    "jake", "maria", "sam",  "lucy"};
  static const std::vector<std::string> verbs = {"packed", "worked", "baked",  "cleaned",
                                                 "walked", "cooked", "painted", "practiced"};
  static const std::vector<std::string> objects = {"bag",  "store", "cake",  "floor",
                                                   "piano", "park",  "dinner", "fence"};
  static const std::vector<std::string> closers = {"everyone smiled", "it was a long day",
                                                   "they felt proud", "the crowd cheered"};
  implausify::Rng rng(seed);
  std::vector<implausify::Story> stories;
  stories.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    const std::string text = rng.pick(subjects) + " " + rng.pick(verbs) + " the " +
                             rng.pick(objects) + ". then " + rng.pick(subjects) + " " +
                             rng.pick(verbs) + " the " + rng.pick(objects) + ". later they saw a " +
                             rng.pick(objects) + ". " + rng.pick(closers) + ".";
    stories.push_back(make_story("s" + std::to_string(i), text));
  }
  return stories;
}

inline void write_file(const std::filesystem::path& path, const std::string& content) {
  std::ofstream out(path);
  out << content;
}

inline std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  return std::string(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
}

}  // namespace testsupport
