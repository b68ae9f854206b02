#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "implausify/manipulation_record.hpp"
#include "implausify/text.hpp"

namespace implausify {

/// A segmented story: ordered sentences of lowercased tokens.
struct Story {
  std::string id;
  std::vector<TokenList> sentences;
  std::string raw;

  bool operator==(const Story&) const = default;
};

enum class Label { kPlausible, kImplausible };

enum class Provenance { kHuman, kHeurSentSub, kHeurKeySub, kUnion, kManPlts, kAfManPlts };

const char* to_string(Label label);
const char* to_string(Provenance provenance);
bool label_from_string(std::string_view name, Label& out);
bool provenance_from_string(std::string_view name, Provenance& out);

/// One dataset row. label == kPlausible iff provenance == kHuman.
struct LabeledExample {
  TokenList text;
  Label label = Label::kPlausible;
  Provenance provenance = Provenance::kHuman;
  std::string source_id;
  std::vector<ManipulationRecord> manipulations;

  bool operator==(const LabeledExample&) const = default;
};

struct DatasetSplit {
  std::vector<LabeledExample> train;
  std::vector<LabeledExample> valid;
  std::vector<LabeledExample> test;
  std::uint64_t seed = 0;

  bool operator==(const DatasetSplit&) const = default;
};

enum class StoryFormat { kJsonl, kPlain };

struct StoryLoadResult {
  std::vector<Story> stories;
  std::size_t skipped_empty = 0;
};

/// Reads stories from a file. jsonl rows carry {"id": str, "text": str};
/// plain format is one story per line with the 1-based line number as id.
/// Stories with no sentences are skipped and counted.
StoryLoadResult load_stories(const std::filesystem::path& path, StoryFormat format);

/// Deterministic seeded partition into (lm, eval); |lm| = round(lm_fraction*n).
std::pair<std::vector<Story>, std::vector<Story>> split_corpus(std::span<const Story> stories,
                                                               double lm_fraction,
                                                               std::uint64_t seed);

/// Writes train/valid/test as one jsonl file per partition plus meta.json.
/// Rejects exact duplicate rows (same text, label, provenance, source id).
void write_dataset(const DatasetSplit& split, const std::filesystem::path& dir);
DatasetSplit read_dataset(const std::filesystem::path& dir);

/// The positive example for a story; text is the sentences joined with a
/// "." token closing each one.
LabeledExample make_positive(const Story& story);
TokenList flatten_story(std::span<const TokenList> sentences);

/// round-half-up used for every fraction-to-count conversion in the library
long fraction_count(double fraction, std::size_t n);

}  // namespace implausify
