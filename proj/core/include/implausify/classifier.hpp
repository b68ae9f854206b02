#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "implausify/text.hpp"

namespace implausify {

struct FeatureConfig {
  int hash_dims = 1 << 20;  // power of two, >= 2^10
  bool use_word_unigrams = true;
  bool use_word_bigrams = true;
  bool use_style = true;

  bool operator==(const FeatureConfig&) const = default;
};

void validate(const FeatureConfig& cfg);

inline constexpr int kStyleDims = 4;

/// Raw style statistics of a token list; featurize stores log1p-scaled
/// copies of the count-valued ones.
struct StyleFeatures {
  double length = 0;                 // token count
  double type_token_ratio = 0;      // distinct / total
  double max_repeated_bigram = 0;   // highest occurrence count of any bigram
  double mean_sentence_length = 0;  // tokens per [.!?]-token-delimited span
};

StyleFeatures style_features(std::span<const Token> text);

/// Sparse feature vector; indices [0, hash_dims) hold signed hashed n-gram
/// counts, [hash_dims, hash_dims + kStyleDims) the style block.
struct SparseVec {
  std::vector<std::pair<int, double>> entries;  // sorted by index, unique
};

SparseVec featurize(std::span<const Token> text, const FeatureConfig& cfg);

struct LinearModel {
  std::vector<double> weights;  // hash_dims + kStyleDims
  double bias = 0.0;
  FeatureConfig config;
  std::uint64_t seed = 0;
};

/// Logistic regression by SGD with per-epoch seeded shuffling and 1/sqrt(t)
/// learning-rate decay. Bitwise deterministic under (inputs, seed).
LinearModel train_classifier(std::span<const TokenList> positives,
                             std::span<const TokenList> negatives, const FeatureConfig& cfg,
                             int epochs, double learning_rate, std::uint64_t seed);

/// sigmoid(w . phi(text) + b), clamped to the open interval (0, 1).
double score(const LinearModel& model, std::span<const Token> text);
double score_features(const LinearModel& model, const SparseVec& features);

double accuracy(const LinearModel& model, std::span<const TokenList> positives,
                std::span<const TokenList> negatives);

/// Logistic loss and its analytic gradient for one example, exposed for
/// gradient verification.
double logistic_loss(const LinearModel& model, const SparseVec& features, int label);
std::vector<double> logistic_gradient(const LinearModel& model, const SparseVec& features,
                                      int label);  // d loss / d weights (dense), last = d bias

/// Versioned JSON serialization holding only nonzero weights.
void save_model(const LinearModel& model, const std::filesystem::path& path);
LinearModel load_model(const std::filesystem::path& path);

}  // namespace implausify
