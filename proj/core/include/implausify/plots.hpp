#pragma once

#include <string>
#include <unordered_set>
#include <vector>

#include "implausify/corpus.hpp"

namespace implausify {

enum class PlotItemKind { kKeyword, kVerb, kInserted };

const char* to_string(PlotItemKind kind);

struct PlotItem {
  std::string surface;
  PlotItemKind kind = PlotItemKind::kKeyword;
  int sentence_index = 0;

  bool operator==(const PlotItem&) const = default;
};

using PlotLine = std::vector<PlotItem>;

/// Per-sentence storyline: one line of plot items per story sentence.
struct Plot {
  std::string story_id;
  std::vector<PlotLine> lines;

  std::size_t item_count() const {
    std::size_t n = 0;
    for (const auto& line : lines) n += line.size();
    return n;
  }

  bool operator==(const Plot&) const = default;
};

/// RAKE-style keyword storyline. Candidate phrases are maximal runs of
/// non-stopword, non-punctuation tokens; a word scores degree/frequency
/// over the phrase co-occurrence graph of the whole story. Each sentence
/// contributes its `per_sentence` best single keywords (ties broken by
/// earlier position), emitted in sentence order. Tokens in the verb
/// lexicon carry kind kVerb.
Plot extract_storyline(const Story& story, int per_sentence,
                       const std::unordered_set<std::string>& stopwords,
                       const std::unordered_set<std::string>& verb_lexicon);

/// Verb/argument plot for long stories: every lexicon verb plus the first
/// non-stopword token after it. Sentences without lexicon verbs fall back
/// to the storyline keywords for that sentence.
Plot extract_verbarg_plot(const Story& story, const std::unordered_set<std::string>& verb_lexicon,
                          const std::unordered_set<std::string>& stopwords,
                          int fallback_per_sentence = 3);

/// Word score used by extract_storyline, exposed for diagnostics.
std::vector<std::pair<std::string, double>> rake_word_scores(
    const Story& story, const std::unordered_set<std::string>& stopwords);

}  // namespace implausify
