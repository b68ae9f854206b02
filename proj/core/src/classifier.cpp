#include "implausify/classifier.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <unordered_map>
#include <unordered_set>

#include <json.hpp>

#include "implausify/errors.hpp"
#include "implausify/rng.hpp"

namespace implausify {

using nlohmann::json;

namespace {

constexpr double kScoreClamp = 1e-12;

double sigmoid(double z) {
  if (z >= 0) {
    const double e = std::exp(-z);
    return 1.0 / (1.0 + e);
  }
  const double e = std::exp(z);
  return e / (1.0 + e);
}

double clamp_probability(double p) {
  return std::min(1.0 - kScoreClamp, std::max(kScoreClamp, p));
}

bool is_sentence_end(const Token& token) {
  return token == "." || token == "!" || token == "?";
}

}  // namespace

void validate(const FeatureConfig& cfg) {
  if (cfg.hash_dims < (1 << 10) || (cfg.hash_dims & (cfg.hash_dims - 1)) != 0)
    throw Error("hash_dims must be a power of two >= 1024");
}

StyleFeatures style_features(std::span<const Token> text) {
  StyleFeatures style;
  style.length = static_cast<double>(text.size());
  std::unordered_set<std::string_view> types;
  for (const auto& token : text) types.insert(token);
  style.type_token_ratio = text.empty() ? 0.0 : static_cast<double>(types.size()) / style.length;

  std::unordered_map<std::string, int> bigrams;
  int max_bigram = 0;
  for (std::size_t i = 0; i + 1 < text.size(); ++i) {
    const int c = ++bigrams[text[i] + '\x1f' + text[i + 1]];
    max_bigram = std::max(max_bigram, c);
  }
  style.max_repeated_bigram = max_bigram;

  std::size_t sentences = 0;
  std::size_t content = 0;
  std::size_t since_break = 0;
  for (const auto& token : text) {
    if (is_sentence_end(token)) {
      if (since_break > 0) ++sentences;
      since_break = 0;
    } else {
      ++since_break;
      ++content;
    }
  }
  if (since_break > 0) ++sentences;
  style.mean_sentence_length =
      sentences == 0 ? 0.0 : static_cast<double>(content) / static_cast<double>(sentences);
  return style;
}

SparseVec featurize(std::span<const Token> text, const FeatureConfig& cfg) {
  validate(cfg);
  if (text.empty()) throw Error("cannot featurize empty text");
  std::unordered_map<int, double> accum;
  const auto add_hashed = [&](std::string_view feature) {
    const std::uint64_t h = stable_hash64(feature);
    const int index = static_cast<int>(h & static_cast<std::uint64_t>(cfg.hash_dims - 1));
    const double sign = (h >> 63) ? 1.0 : -1.0;
    accum[index] += sign;
  };
  if (cfg.use_word_unigrams) {
    for (const auto& token : text) add_hashed("u\x1f" + token);
  }
  if (cfg.use_word_bigrams) {
    for (std::size_t i = 0; i + 1 < text.size(); ++i)
      add_hashed("b\x1f" + text[i] + '\x1f' + text[i + 1]);
  }
  if (cfg.use_style) {
    const StyleFeatures style = style_features(text);
    accum[cfg.hash_dims + 0] += std::log1p(style.length);
    accum[cfg.hash_dims + 1] += style.type_token_ratio;
    accum[cfg.hash_dims + 2] += std::log1p(style.max_repeated_bigram);
    accum[cfg.hash_dims + 3] += std::log1p(style.mean_sentence_length);
  }
  SparseVec vec;
  vec.entries.assign(accum.begin(), accum.end());
  std::erase_if(vec.entries, [](const auto& e) { return e.second == 0.0; });
  std::sort(vec.entries.begin(), vec.entries.end());
  return vec;
}

namespace {

double dot(const LinearModel& model, const SparseVec& features) {
  double z = model.bias;
  for (const auto& [index, value] : features.entries) z += model.weights[index] * value;
  return z;
}

}  // namespace

LinearModel train_classifier(std::span<const TokenList> positives,
                             std::span<const TokenList> negatives, const FeatureConfig& cfg,
                             int epochs, double learning_rate, std::uint64_t seed) {
  validate(cfg);
  if (positives.empty() || negatives.empty())
    throw Error("training requires at least one example of each class");

  struct Example {
    SparseVec features;
    int label;
  };
  std::vector<Example> examples;
  examples.reserve(positives.size() + negatives.size());
  for (const auto& text : positives) examples.push_back({featurize(text, cfg), 1});
  for (const auto& text : negatives) examples.push_back({featurize(text, cfg), 0});

  LinearModel model;
  model.config = cfg;
  model.seed = seed;
  model.weights.assign(static_cast<std::size_t>(cfg.hash_dims + kStyleDims), 0.0);

  Rng rng(mix_seed(seed, stable_hash64("sgd")));
  std::vector<std::size_t> order(examples.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;

  std::uint64_t step = 0;
  for (int epoch = 0; epoch < epochs; ++epoch) {
    rng.shuffle(order);
    for (const std::size_t index : order) {
      ++step;
      const double lr = learning_rate / std::sqrt(static_cast<double>(step));
      const Example& example = examples[index];
      const double p = sigmoid(dot(model, example.features));
      const double gradient = p - static_cast<double>(example.label);
      for (const auto& [i, value] : example.features.entries)
        model.weights[i] -= lr * gradient * value;
      model.bias -= lr * gradient;
    }
  }
  return model;
}

double score_features(const LinearModel& model, const SparseVec& features) {
  return clamp_probability(sigmoid(dot(model, features)));
}

double score(const LinearModel& model, std::span<const Token> text) {
  return score_features(model, featurize(text, model.config));
}

double accuracy(const LinearModel& model, std::span<const TokenList> positives,
                std::span<const TokenList> negatives) {
  if (positives.empty() && negatives.empty()) return 0.0;
  std::size_t correct = 0;
  for (const auto& text : positives) correct += score(model, text) >= 0.5;
  for (const auto& text : negatives) correct += score(model, text) < 0.5;
  return static_cast<double>(correct) /
         static_cast<double>(positives.size() + negatives.size());
}

double logistic_loss(const LinearModel& model, const SparseVec& features, int label) {
  const double p = clamp_probability(sigmoid(dot(model, features)));
  return label ? -std::log(p) : -std::log(1.0 - p);
}

std::vector<double> logistic_gradient(const LinearModel& model, const SparseVec& features,
                                      int label) {
  const double p = sigmoid(dot(model, features));
  const double g = p - static_cast<double>(label);
  std::vector<double> gradient(model.weights.size() + 1, 0.0);
  for (const auto& [index, value] : features.entries) gradient[index] = g * value;
  gradient.back() = g;  // bias
  return gradient;
}

void save_model(const LinearModel& model, const std::filesystem::path& path) {
  json weights = json::array();
  for (std::size_t i = 0; i < model.weights.size(); ++i) {
    if (model.weights[i] != 0.0) weights.push_back({i, model.weights[i]});
  }
  const json doc{{"format_version", 1},
                 {"config",
                  {{"hash_dims", model.config.hash_dims},
                   {"use_word_unigrams", model.config.use_word_unigrams},
                   {"use_word_bigrams", model.config.use_word_bigrams},
                   {"use_style", model.config.use_style}}},
                 {"bias", model.bias},
                 {"seed", model.seed},
                 {"weights", std::move(weights)}};
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path.string());
  out << doc.dump() << '\n';
  if (!out) throw IoError("write failed: " + path.string());
}

LinearModel load_model(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());
  json doc = json::parse(in, nullptr, false);
  if (doc.is_discarded()) throw ParseError("invalid model file: " + path.string());
  if (doc.value("format_version", 0) != 1)
    throw ParseError("unsupported model format_version in " + path.string());
  LinearModel model;
  const auto& cfg = doc.at("config");
  model.config.hash_dims = cfg.at("hash_dims").get<int>();
  model.config.use_word_unigrams = cfg.value("use_word_unigrams", true);
  model.config.use_word_bigrams = cfg.value("use_word_bigrams", true);
  model.config.use_style = cfg.value("use_style", true);
  validate(model.config);
  model.bias = doc.at("bias").get<double>();
  model.seed = doc.value("seed", std::uint64_t{0});
  model.weights.assign(static_cast<std::size_t>(model.config.hash_dims + kStyleDims), 0.0);
  for (const auto& entry : doc.at("weights")) {
    const std::size_t index = entry.at(0).get<std::size_t>();
    if (index >= model.weights.size()) throw ParseError("weight index out of range");
    model.weights[index] = entry.at(1).get<double>();
  }
  return model;
}

}  // namespace implausify
