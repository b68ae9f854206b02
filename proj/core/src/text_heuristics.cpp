#include "implausify/text_heuristics.hpp"

#include <algorithm>

namespace implausify {

namespace {

std::vector<const Story*> donor_stories(std::span<const Story> pool, const std::string& self_id) {
  std::vector<const Story*> donors;
  for (const auto& story : pool) {
    if (story.id != self_id && !story.sentences.empty()) donors.push_back(&story);
  }
  return donors;
}

LabeledExample base_example(const Story& story, Provenance provenance) {
  LabeledExample example;
  example.label = Label::kImplausible;
  example.provenance = provenance;
  example.source_id = story.id;
  return example;
}

/// Replaces `count` distinct sentence slots with donor sentences; one
/// record per slot.
void substitute_sentences(std::vector<TokenList>& sentences,
                          const std::vector<const Story*>& donors, Rng& rng, long count,
                          std::vector<ManipulationRecord>& records) {
  std::vector<std::size_t> slots(sentences.size());
  for (std::size_t i = 0; i < slots.size(); ++i) slots[i] = i;
  rng.shuffle(slots);
  slots.resize(static_cast<std::size_t>(count));
  std::sort(slots.begin(), slots.end());
  for (std::size_t slot : slots) {
    const Story& donor = *donors[rng.below(donors.size())];
    const TokenList& sentence = donor.sentences[rng.below(donor.sentences.size())];
    sentences[slot] = sentence;
    ManipulationRecord record;
    record.technique = Technique::kRandSub;
    record.positions.emplace_back(static_cast<int>(slot), 0);
    record.inserted = sentence;
    record.detail = "sentence_substitution donor=" + donor.id;
    records.push_back(std::move(record));
  }
}

struct KeywordSite {
  std::size_t sentence;
  std::size_t index;
};

std::vector<KeywordSite> substitutable_sites(const std::vector<TokenList>& sentences,
                                             const TripleStore& store) {
  std::vector<KeywordSite> sites;
  for (std::size_t s = 0; s < sentences.size(); ++s) {
    for (std::size_t i = 0; i < sentences[s].size(); ++i) {
      if (is_punctuation(sentences[s][i])) continue;
      if (!store.contradictions(sentences[s][i]).empty()) sites.push_back({s, i});
    }
  }
  return sites;
}

/// Replaces the token at `site` with a uniformly chosen counterpart phrase,
/// splicing multi-word phrases in place.
void substitute_keyword(std::vector<TokenList>& sentences, const KeywordSite& site,
                        const TripleStore& store, Rng& rng,
                        std::vector<ManipulationRecord>& records, const char* rule) {
  TokenList& sentence = sentences[site.sentence];
  const std::string original = sentence[site.index];
  const auto candidates = store.contradictions(original);
  const std::string phrase = candidates[rng.below(candidates.size())];
  const TokenList phrase_tokens = split_whitespace(phrase);
  sentence.erase(sentence.begin() + static_cast<long>(site.index));
  sentence.insert(sentence.begin() + static_cast<long>(site.index), phrase_tokens.begin(),
                  phrase_tokens.end());
  ManipulationRecord record;
  record.technique = Technique::kContradict;
  for (std::size_t k = 0; k < phrase_tokens.size(); ++k)
    record.positions.emplace_back(static_cast<int>(site.sentence),
                                  static_cast<int>(site.index + k));
  record.inserted = phrase_tokens;
  record.detail = std::string(rule) + " " + original + "->" + phrase;
  records.push_back(std::move(record));
}

}  // namespace

std::optional<LabeledExample> heur_sent_sub(const Story& story, std::span<const Story> pool,
                                            Rng& rng, double frac) {
  const std::size_t n_sentences = story.sentences.size();
  if (n_sentences < 2) return std::nullopt;
  const auto donors = donor_stories(pool, story.id);
  if (donors.empty()) return std::nullopt;
  const long count = std::clamp<long>(fraction_count(frac, n_sentences), 1,
                                      static_cast<long>(n_sentences));
  auto sentences = story.sentences;
  LabeledExample example = base_example(story, Provenance::kHeurSentSub);
  substitute_sentences(sentences, donors, rng, count, example.manipulations);
  example.text = flatten_story(sentences);
  return example;
}

std::optional<LabeledExample> heur_key_sub(const Story& story, const TripleStore& store, Rng& rng,
                                           double frac,
                                           const std::unordered_set<std::string>& stopwords) {
  auto sentences = story.sentences;
  auto sites = substitutable_sites(sentences, store);
  if (sites.empty()) return std::nullopt;
  std::size_t keyword_count = 0;
  for (const auto& sentence : sentences) {
    for (const auto& token : sentence) {
      if (!is_punctuation(token) && !stopwords.contains(token)) ++keyword_count;
    }
  }
  const long target = std::clamp<long>(fraction_count(frac, keyword_count), 1,
                                       static_cast<long>(sites.size()));
  rng.shuffle(sites);
  sites.resize(static_cast<std::size_t>(target));
  // Apply right-to-left so earlier site indices stay valid in the sentence.
  std::sort(sites.begin(), sites.end(), [](const KeywordSite& a, const KeywordSite& b) {
    return std::tie(a.sentence, a.index) > std::tie(b.sentence, b.index);
  });
  LabeledExample example = base_example(story, Provenance::kHeurKeySub);
  for (const auto& site : sites)
    substitute_keyword(sentences, site, store, rng, example.manipulations, "keyword_substitution");
  example.text = flatten_story(sentences);
  return example;
}

std::optional<LabeledExample> union_manipulate_with(const Story& story, unsigned mask,
                                                    const TripleStore& store,
                                                    std::span<const Story> pool, Rng& rng,
                                                    const std::unordered_set<std::string>& /*stopwords*/,
                                                    const std::unordered_set<std::string>& verb_lexicon) {
  if (story.sentences.size() < 4) return std::nullopt;
  auto sentences = story.sentences;
  LabeledExample example = base_example(story, Provenance::kUnion);

  if (mask & static_cast<unsigned>(UnionTechnique::kNgramRepeat)) {
    std::vector<std::size_t> nonempty;
    for (std::size_t s = 0; s < sentences.size(); ++s) {
      if (!sentences[s].empty()) nonempty.push_back(s);
    }
    if (!nonempty.empty()) {
      const std::size_t s = nonempty[rng.below(nonempty.size())];
      TokenList& sentence = sentences[s];
      const std::size_t n = 1 + rng.below(std::min<std::size_t>(3, sentence.size()));
      const std::size_t start = rng.below(sentence.size() - n + 1);
      const TokenList ngram(sentence.begin() + static_cast<long>(start),
                            sentence.begin() + static_cast<long>(start + n));
      sentence.insert(sentence.begin() + static_cast<long>(start + n), ngram.begin(), ngram.end());
      ManipulationRecord record;
      record.technique = Technique::kRepeat;
      for (std::size_t k = 0; k < n; ++k)
        record.positions.emplace_back(static_cast<int>(s), static_cast<int>(start + n + k));
      record.inserted = ngram;
      record.detail = "ngram_repeat n=" + std::to_string(n);
      example.manipulations.push_back(std::move(record));
    }
  }

  if (mask & static_cast<unsigned>(UnionTechnique::kSentenceReorder)) {
    const std::size_t i = rng.below(sentences.size());
    std::size_t j = rng.below(sentences.size() - 1);
    if (j >= i) ++j;
    std::swap(sentences[i], sentences[j]);
    ManipulationRecord record;
    record.technique = Technique::kReorder;
    record.positions.emplace_back(static_cast<int>(std::min(i, j)), 0);
    record.positions.emplace_back(static_cast<int>(std::max(i, j)), 0);
    record.detail = "sentence_reorder swap=" + std::to_string(i) + "," + std::to_string(j);
    example.manipulations.push_back(std::move(record));
  }

  if (mask & static_cast<unsigned>(UnionTechnique::kNegationInsert)) {
    std::vector<KeywordSite> auxiliaries;
    std::vector<KeywordSite> verbs;
    for (std::size_t s = 0; s < sentences.size(); ++s) {
      for (std::size_t i = 0; i < sentences[s].size(); ++i) {
        if (negation_auxiliaries().contains(sentences[s][i])) auxiliaries.push_back({s, i});
        else if (verb_lexicon.contains(sentences[s][i])) verbs.push_back({s, i});
      }
    }
    std::optional<KeywordSite> site;
    std::size_t offset = 0;  // after an auxiliary, before a verb
    if (!auxiliaries.empty()) {
      site = auxiliaries[rng.below(auxiliaries.size())];
      offset = 1;
    } else if (!verbs.empty()) {
      site = verbs[rng.below(verbs.size())];
    }
    if (site) {
      TokenList& sentence = sentences[site->sentence];
      sentence.insert(sentence.begin() + static_cast<long>(site->index + offset), "not");
      ManipulationRecord record;
      record.technique = Technique::kContradict;
      record.positions.emplace_back(static_cast<int>(site->sentence),
                                    static_cast<int>(site->index + offset));
      record.inserted = {"not"};
      record.detail = "negation_insert";
      example.manipulations.push_back(std::move(record));
    }
  }

  if (mask & static_cast<unsigned>(UnionTechnique::kKeywordSub)) {
    auto sites = substitutable_sites(sentences, store);
    if (!sites.empty()) {
      const KeywordSite site = sites[rng.below(sites.size())];
      substitute_keyword(sentences, site, store, rng, example.manipulations, "keyword_substitution");
    }
  }

  if (mask & static_cast<unsigned>(UnionTechnique::kSentenceSub)) {
    const auto donors = donor_stories(pool, story.id);
    if (!donors.empty()) substitute_sentences(sentences, donors, rng, 1, example.manipulations);
  }

  if (example.manipulations.empty()) return std::nullopt;
  example.text = flatten_story(sentences);
  return example;
}

std::optional<LabeledExample> union_manipulate(const Story& story, const TripleStore& store,
                                               std::span<const Story> pool, Rng& rng,
                                               const std::unordered_set<std::string>& stopwords,
                                               const std::unordered_set<std::string>& verb_lexicon) {
  if (story.sentences.size() < 4) return std::nullopt;
  for (int attempt = 0; attempt < 32; ++attempt) {
    const unsigned mask = 1 + static_cast<unsigned>(rng.below((1u << kUnionTechniqueCount) - 1));
    auto example = union_manipulate_with(story, mask, store, pool, rng, stopwords, verb_lexicon);
    if (example) return example;
  }
  // kNgramRepeat always has a target for a non-empty story.
  return union_manipulate_with(story, static_cast<unsigned>(UnionTechnique::kNgramRepeat), store,
                               pool, rng, stopwords, verb_lexicon);
}

}  // namespace implausify
