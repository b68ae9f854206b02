#include "implausify/ngram.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "implausify/errors.hpp"

namespace implausify {

namespace {
constexpr double kBackoffDiscount = 0.4;
}

std::string NGramModel::context_key(std::span<const std::string> context) {
  std::string key;
  for (std::size_t i = 0; i < context.size(); ++i) {
    if (i) key.push_back('\x1f');
    key += context[i];
  }
  return key;
}

NGramModel NGramModel::train(std::span<const Story> stories, int order) {
  if (order < 1) throw Error("ngram order must be >= 1");
  if (stories.empty()) throw Error("cannot train ngram model on an empty corpus");
  NGramModel model;
  model.order_ = order;
  model.levels_.resize(static_cast<std::size_t>(order));
  std::set<std::string> vocab;
  for (const auto& story : stories) {
    for (const auto& sentence : story.sentences) {
      std::vector<std::string> padded;
      padded.reserve(sentence.size() + static_cast<std::size_t>(order));
      for (int i = 0; i + 1 < order; ++i) padded.emplace_back(kSentenceStart);
      padded.insert(padded.end(), sentence.begin(), sentence.end());
      padded.emplace_back(kSentenceEnd);
      const std::size_t lead = static_cast<std::size_t>(order - 1);
      for (std::size_t pos = lead; pos < padded.size(); ++pos) {
        const std::string& token = padded[pos];
        vocab.insert(token);
        ++model.total_tokens_;
        for (int m = 0; m < order; ++m) {
          const auto context = std::span<const std::string>(padded).subspan(
              pos - static_cast<std::size_t>(m), static_cast<std::size_t>(m));
          auto& bucket = model.levels_[static_cast<std::size_t>(m)][context_key(context)];
          ++bucket.next[token];
          ++bucket.total;
        }
      }
    }
  }
  vocab.erase(kSentenceStart);
  model.vocabulary_.assign(vocab.begin(), vocab.end());
  return model;
}

const NGramModel::ContextCounts* NGramModel::find_context(
    std::span<const std::string> context) const {
  const std::size_t m = context.size();
  if (m >= levels_.size()) return nullptr;
  const auto& level = levels_[m];
  auto it = level.find(context_key(context));
  return it == level.end() ? nullptr : &it->second;
}

std::uint64_t NGramModel::count(std::span<const std::string> context,
                                const std::string& token) const {
  const ContextCounts* bucket = find_context(context);
  if (!bucket) return 0;
  auto it = bucket->next.find(token);
  return it == bucket->next.end() ? 0 : it->second;
}

double NGramModel::score(std::span<const std::string> context, const std::string& token) const {
  auto ctx = context.size() > static_cast<std::size_t>(order_ - 1)
                 ? context.subspan(context.size() - static_cast<std::size_t>(order_ - 1))
                 : context;
  double discount = 1.0;
  while (true) {
    const ContextCounts* bucket = find_context(ctx);
    if (bucket) {
      auto it = bucket->next.find(token);
      if (it != bucket->next.end())
        return discount * static_cast<double>(it->second) / static_cast<double>(bucket->total);
    }
    if (ctx.empty()) return 0.0;
    ctx = ctx.subspan(1);
    discount *= kBackoffDiscount;
  }
}

std::string NGramModel::sample(std::span<const std::string> context, int top_k, double temperature,
                               Rng& rng) const {
  if (top_k < 1 || temperature <= 0.0) throw Error("invalid sampling config");
  auto ctx = context.size() > static_cast<std::size_t>(order_ - 1)
                 ? context.subspan(context.size() - static_cast<std::size_t>(order_ - 1))
                 : context;
  // Candidates are continuations seen at any backoff level of this context.
  std::set<std::string> candidates;
  for (auto c = ctx;; c = c.subspan(1)) {
    if (const ContextCounts* bucket = find_context(c)) {
      for (const auto& [token, _] : bucket->next) candidates.insert(token);
    }
    if (c.empty()) break;
  }
  if (candidates.empty()) return kSentenceEnd;

  struct Scored {
    std::string token;
    double log_score;
  };
  std::vector<Scored> scored;
  scored.reserve(candidates.size());
  for (const auto& token : candidates)
    scored.push_back({token, std::log(score(ctx, token))});
  std::sort(scored.begin(), scored.end(), [](const Scored& a, const Scored& b) {
    if (a.log_score != b.log_score) return a.log_score > b.log_score;
    return a.token < b.token;
  });
  if (scored.size() > static_cast<std::size_t>(top_k))
    scored.resize(static_cast<std::size_t>(top_k));

  const double max_log = scored.front().log_score;
  std::vector<double> weights(scored.size());
  double total = 0.0;
  for (std::size_t i = 0; i < scored.size(); ++i) {
    weights[i] = std::exp((scored[i].log_score - max_log) / temperature);
    total += weights[i];
  }
  double draw = rng.uniform01() * total;
  for (std::size_t i = 0; i < scored.size(); ++i) {
    draw -= weights[i];
    if (draw <= 0.0) return scored[i].token;
  }
  return scored.back().token;
}

}  // namespace implausify
