#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "implausify/corpus.hpp"
#include "implausify/rng.hpp"

namespace implausify {

inline constexpr const char* kSentenceStart = "<s>";
inline constexpr const char* kSentenceEnd = "</s>";

/// Count-based n-gram model with stupid-backoff scoring (discount 0.4).
/// Immutable after training; sampling is pure given (model, rng).
class NGramModel {
 public:
  /// Counts all n-gram orders 1..order over padded story sentences.
  static NGramModel train(std::span<const Story> stories, int order);

  int order() const { return order_; }
  const std::vector<std::string>& vocabulary() const { return vocabulary_; }

  /// Backoff score of `token` after `context` (most recent token last).
  double score(std::span<const std::string> context, const std::string& token) const;

  /// Count table lookup for one context at a given level, for inspection.
  std::uint64_t count(std::span<const std::string> context, const std::string& token) const;

  /// Top-k temperature sampling over backoff scores. Candidates are ranked
  /// by (score desc, token asc) so draws are reproducible.
  std::string sample(std::span<const std::string> context, int top_k, double temperature,
                     Rng& rng) const;

 private:
  struct ContextCounts {
    std::unordered_map<std::string, std::uint64_t> next;
    std::uint64_t total = 0;
  };

  static std::string context_key(std::span<const std::string> context);
  const ContextCounts* find_context(std::span<const std::string> context) const;

  int order_ = 1;
  // levels_[m] holds (m+1)-gram counts keyed by their m-token context
  std::vector<std::unordered_map<std::string, ContextCounts>> levels_;
  std::vector<std::string> vocabulary_;  // sorted, excludes <s>
  std::uint64_t total_tokens_ = 0;
};

}  // namespace implausify
