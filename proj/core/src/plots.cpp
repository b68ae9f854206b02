#include "implausify/plots.hpp"

#include <algorithm>
#include <unordered_map>

namespace implausify {

const char* to_string(PlotItemKind kind) {
  switch (kind) {
    case PlotItemKind::kKeyword: return "keyword";
    case PlotItemKind::kVerb: return "verb";
    case PlotItemKind::kInserted: return "inserted";
  }
  return "keyword";
}

namespace {

bool is_content_token(const std::string& token, const std::unordered_set<std::string>& stopwords) {
  return !is_punctuation(token) && !stopwords.contains(token);
}

/// Maximal stopword/punctuation-free runs across all sentences.
std::vector<std::vector<std::string>> candidate_phrases(
    const Story& story, const std::unordered_set<std::string>& stopwords) {
  std::vector<std::vector<std::string>> phrases;
  for (const auto& sentence : story.sentences) {
    std::vector<std::string> current;
    for (const auto& token : sentence) {
      if (is_content_token(token, stopwords)) {
        current.push_back(token);
      } else if (!current.empty()) {
        phrases.push_back(std::move(current));
        current.clear();
      }
    }
    if (!current.empty()) phrases.push_back(std::move(current));
  }
  return phrases;
}

std::unordered_map<std::string, double> score_words(
    const Story& story, const std::unordered_set<std::string>& stopwords) {
  std::unordered_map<std::string, double> freq;
  std::unordered_map<std::string, double> degree;
  for (const auto& phrase : candidate_phrases(story, stopwords)) {
    for (const auto& word : phrase) {
      freq[word] += 1.0;
      degree[word] += static_cast<double>(phrase.size());
    }
  }
  std::unordered_map<std::string, double> scores;
  for (const auto& [word, f] : freq) scores[word] = degree[word] / f;
  return scores;
}

PlotItemKind kind_of(const std::string& token, const std::unordered_set<std::string>& verb_lexicon) {
  return verb_lexicon.contains(token) ? PlotItemKind::kVerb : PlotItemKind::kKeyword;
}

PlotLine storyline_line(const TokenList& sentence, int sentence_index, int per_sentence,
                        const std::unordered_map<std::string, double>& scores,
                        const std::unordered_set<std::string>& stopwords,
                        const std::unordered_set<std::string>& verb_lexicon) {
  struct Candidate {
    std::string word;
    double score;
    std::size_t position;
  };
  std::vector<Candidate> candidates;
  for (std::size_t pos = 0; pos < sentence.size(); ++pos) {
    const auto& token = sentence[pos];
    if (!is_content_token(token, stopwords)) continue;
    bool seen = std::any_of(candidates.begin(), candidates.end(),
                            [&](const Candidate& c) { return c.word == token; });
    if (seen) continue;
    auto it = scores.find(token);
    candidates.push_back({token, it == scores.end() ? 0.0 : it->second, pos});
  }
  std::stable_sort(candidates.begin(), candidates.end(), [](const Candidate& a, const Candidate& b) {
    if (a.score != b.score) return a.score > b.score;
    return a.position < b.position;
  });
  if (candidates.size() > static_cast<std::size_t>(per_sentence))
    candidates.resize(static_cast<std::size_t>(per_sentence));
  std::sort(candidates.begin(), candidates.end(),
            [](const Candidate& a, const Candidate& b) { return a.position < b.position; });
  PlotLine line;
  for (auto& candidate : candidates) {
    const PlotItemKind kind = kind_of(candidate.word, verb_lexicon);
    line.push_back({std::move(candidate.word), kind, sentence_index});
  }
  return line;
}

}  // namespace

std::vector<std::pair<std::string, double>> rake_word_scores(
    const Story& story, const std::unordered_set<std::string>& stopwords) {
  auto scores = score_words(story, stopwords);
  std::vector<std::pair<std::string, double>> out(scores.begin(), scores.end());
  std::sort(out.begin(), out.end());
  return out;
}

Plot extract_storyline(const Story& story, int per_sentence,
                       const std::unordered_set<std::string>& stopwords,
                       const std::unordered_set<std::string>& verb_lexicon) {
  const auto scores = score_words(story, stopwords);
  Plot plot;
  plot.story_id = story.id;
  plot.lines.reserve(story.sentences.size());
  for (std::size_t s = 0; s < story.sentences.size(); ++s) {
    plot.lines.push_back(storyline_line(story.sentences[s], static_cast<int>(s), per_sentence,
                                        scores, stopwords, verb_lexicon));
  }
  return plot;
}

Plot extract_verbarg_plot(const Story& story, const std::unordered_set<std::string>& verb_lexicon,
                          const std::unordered_set<std::string>& stopwords,
                          int fallback_per_sentence) {
  const Plot fallback = extract_storyline(story, fallback_per_sentence, stopwords, verb_lexicon);
  Plot plot;
  plot.story_id = story.id;
  plot.lines.reserve(story.sentences.size());
  for (std::size_t s = 0; s < story.sentences.size(); ++s) {
    const auto& sentence = story.sentences[s];
    // position -> kind; verbs win over argument slots claimed earlier
    std::vector<int> selected(sentence.size(), -1);
    bool any_verb = false;
    for (std::size_t pos = 0; pos < sentence.size(); ++pos) {
      if (!verb_lexicon.contains(sentence[pos])) continue;
      any_verb = true;
      selected[pos] = static_cast<int>(PlotItemKind::kVerb);
      for (std::size_t arg = pos + 1; arg < sentence.size(); ++arg) {
        if (!is_content_token(sentence[arg], stopwords)) continue;
        if (selected[arg] == -1) selected[arg] = static_cast<int>(PlotItemKind::kKeyword);
        break;
      }
    }
    if (!any_verb) {
      plot.lines.push_back(fallback.lines[s]);
      continue;
    }
    PlotLine line;
    for (std::size_t pos = 0; pos < sentence.size(); ++pos) {
      if (selected[pos] == -1) continue;
      line.push_back({sentence[pos], static_cast<PlotItemKind>(selected[pos]), static_cast<int>(s)});
    }
    plot.lines.push_back(std::move(line));
  }
  return plot;
}

}  // namespace implausify
