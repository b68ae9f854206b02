#pragma once

#include <optional>
#include <span>

#include "implausify/corpus.hpp"
#include "implausify/kb.hpp"
#include "implausify/rng.hpp"

namespace implausify {

/// Replaces exactly round(frac * sentences) sentence slots with sentences
/// drawn from other pool stories; the rest stay byte-identical. nullopt
/// (skip) for one-sentence stories or a pool without donors.
std::optional<LabeledExample> heur_sent_sub(const Story& story, std::span<const Story> pool,
                                            Rng& rng, double frac = 0.5);

/// Replaces up to round(frac * K) keywords (K = non-stopword token count)
/// in place with a contradiction counterpart from the store, at least one.
/// nullopt when the story has no substitutable keyword.
std::optional<LabeledExample> heur_key_sub(const Story& story, const TripleStore& store, Rng& rng,
                                           double frac = 0.15,
                                           const std::unordered_set<std::string>& stopwords =
                                               default_stopwords());

/// Text-level manipulation families used by union_manipulate.
enum class UnionTechnique : unsigned {
  kNgramRepeat = 1u << 0,
  kSentenceReorder = 1u << 1,
  kNegationInsert = 1u << 2,
  kKeywordSub = 1u << 3,
  kSentenceSub = 1u << 4,
};
inline constexpr unsigned kUnionTechniqueCount = 5;

/// Applies a uniformly drawn non-empty subset of the five techniques to a
/// story of at least four sentences. Subsets whose techniques all lack a
/// target are redrawn. nullopt (skip) below four sentences.
std::optional<LabeledExample> union_manipulate(const Story& story, const TripleStore& store,
                                               std::span<const Story> pool, Rng& rng,
                                               const std::unordered_set<std::string>& stopwords =
                                                   default_stopwords(),
                                               const std::unordered_set<std::string>& verb_lexicon = {});

/// Deterministic core of union_manipulate: applies exactly the techniques
/// in `mask` (bitwise-or of UnionTechnique). Exposed for direct testing.
std::optional<LabeledExample> union_manipulate_with(const Story& story, unsigned mask,
                                                    const TripleStore& store,
                                                    std::span<const Story> pool, Rng& rng,
                                                    const std::unordered_set<std::string>& stopwords,
                                                    const std::unordered_set<std::string>& verb_lexicon);

}  // namespace implausify
