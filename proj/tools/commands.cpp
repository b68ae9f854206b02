#include "commands.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>

#include <json.hpp>

#include "implausify/af.hpp"
#include "implausify/classifier.hpp"
#include "implausify/corpus.hpp"
#include "implausify/errors.hpp"
#include "implausify/metrics.hpp"
#include "implausify/parallel.hpp"
#include "implausify/plot_manip.hpp"
#include "implausify/plots.hpp"
#include "implausify/realize.hpp"
#include "implausify/rng.hpp"
#include "implausify/text_heuristics.hpp"

namespace implausify::cli {

using nlohmann::json;

namespace {

StoryFormat parse_format(const std::string& name) {
  if (name == "jsonl") return StoryFormat::kJsonl;
  if (name == "plain") return StoryFormat::kPlain;
  throw UsageError("unknown corpus format: " + name);
}

std::unordered_set<std::string> load_optional_wordlist(const std::string& path,
                                                       const std::unordered_set<std::string>& fallback) {
  return path.empty() ? fallback : load_wordlist(path);
}

Generator make_generator(const Options& options, const NGramModel* model) {
  if (options.generator == "template") return TemplateGenerator{};
  if (options.generator == "ngram") {
    GenConfig cfg;
    cfg.top_k = options.top_k;
    cfg.temperature = options.temperature;
    cfg.max_len = options.max_len;
    validate(cfg);
    return NGramGenerator{model, cfg};
  }
  if (options.generator.starts_with("external:")) {
    ExternalGenerator external;
    external.command = options.generator.substr(std::string("external:").size());
    external.timeout = std::chrono::milliseconds(options.generator_timeout_ms);
    if (external.command.empty()) throw UsageError("empty external generator command");
    return external;
  }
  throw UsageError("unknown generator: " + options.generator +
              " (expected template, ngram or external:<cmd>)");
}

/// Seeded uniform example split with round-half-up partition sizes.
DatasetSplit split_examples(std::vector<LabeledExample> examples, double train_ratio,
                            double valid_ratio, std::uint64_t seed) {
  if (train_ratio < 0 || valid_ratio < 0 || train_ratio + valid_ratio > 1.0)
    throw UsageError("train/valid ratios must be non-negative and sum to at most 1");
  std::vector<std::size_t> order(examples.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  Rng rng(mix_seed(seed, stable_hash64("dataset_split")));
  rng.shuffle(order);
  const auto n = static_cast<long>(examples.size());
  const long n_train = std::clamp<long>(fraction_count(train_ratio, examples.size()), 0, n);
  const long n_valid = std::clamp<long>(fraction_count(valid_ratio, examples.size()), 0, n - n_train);
  DatasetSplit split;
  split.seed = seed;
  for (long i = 0; i < n; ++i) {
    auto& example = examples[order[static_cast<std::size_t>(i)]];
    if (i < n_train) split.train.push_back(std::move(example));
    else if (i < n_train + n_valid) split.valid.push_back(std::move(example));
    else split.test.push_back(std::move(example));
  }
  return split;
}

struct StrategyOutput {
  std::vector<LabeledExample> examples;
  std::size_t skipped = 0;
};

using HeuristicFn = std::function<std::optional<LabeledExample>(const Story&, Rng&)>;

/// Runs one negative constructor per story in parallel; a story whose
/// constructor skips is excluded together with its positive.
StrategyOutput per_story_pairs(std::span<const Story> stories, const HeuristicFn& fn,
                               std::string_view strategy, std::uint64_t seed, unsigned threads) {
  std::vector<std::optional<LabeledExample>> negatives(stories.size());
  parallel_for(stories.size(), threads, [&](std::size_t i) {
    Rng rng(mix_seed(story_seed(seed, stories[i].id), stable_hash64(strategy)));
    negatives[i] = fn(stories[i], rng);
  });
  StrategyOutput output;
  for (std::size_t i = 0; i < stories.size(); ++i) {
    if (!negatives[i]) {
      ++output.skipped;
      continue;
    }
    output.examples.push_back(make_positive(stories[i]));
    output.examples.push_back(std::move(*negatives[i]));
  }
  return output;
}

std::vector<Plot> extract_plots(std::span<const Story> stories, const Options& options,
                                const std::unordered_set<std::string>& stopwords,
                                const std::unordered_set<std::string>& verbs, unsigned threads) {
  std::vector<Plot> plots(stories.size());
  parallel_for(stories.size(), threads, [&](std::size_t i) {
    if (options.plot_extractor == "verbarg") {
      plots[i] = extract_verbarg_plot(stories[i], verbs, stopwords, std::max(options.per_sentence, 3));
    } else {
      plots[i] = extract_storyline(stories[i], options.per_sentence, stopwords, verbs);
    }
  });
  return plots;
}

/// Realizes one manipulated plot per story (the single-negative strategy),
/// batching external generation.
StrategyOutput build_manplts(std::span<const Story> stories, std::span<const Plot> plots,
                             const TripleStore& store, const Generator& generator,
                             const ComposeConfig& cfg, std::uint64_t seed, unsigned threads) {
  struct Slot {
    std::optional<ManipulatedPlot> mplot;
    TokenList text;
  };
  std::vector<Slot> slots(stories.size());
  const bool external = std::holds_alternative<ExternalGenerator>(generator);

  auto compose_at = [&](std::size_t i, int attempt) {
    const std::uint64_t s = mix_seed(
        mix_seed(story_seed(seed, stories[i].id), stable_hash64("manplts")),
        static_cast<std::uint64_t>(attempt));
    Rng rng(s);
    return compose_manipulations(plots[i], store, plots, rng, cfg);
  };
  auto realize_at = [&](std::size_t i, const ManipulatedPlot& mplot, int attempt) {
    const std::uint64_t s = mix_seed(
        mix_seed(story_seed(seed, stories[i].id), stable_hash64("manplts_realize")),
        static_cast<std::uint64_t>(attempt));
    return realize_with(generator, mplot, s);
  };

  parallel_for(stories.size(), threads, [&](std::size_t i) {
    try {
      slots[i].mplot = compose_at(i, 0);
    } catch (const CompositionInfeasible&) {
      slots[i].mplot.reset();
    }
  });

  if (external) {
    std::vector<ManipulatedPlot> batch;
    std::vector<std::size_t> owners;
    for (std::size_t i = 0; i < slots.size(); ++i) {
      if (slots[i].mplot) {
        batch.push_back(*slots[i].mplot);
        owners.push_back(i);
      }
    }
    auto texts = external_generate(batch, std::get<ExternalGenerator>(generator));
    for (std::size_t k = 0; k < owners.size(); ++k) slots[owners[k]].text = std::move(texts[k]);
  } else {
    parallel_for(stories.size(), threads, [&](std::size_t i) {
      if (slots[i].mplot) slots[i].text = realize_at(i, *slots[i].mplot, 0);
    });
  }

  StrategyOutput output;
  for (std::size_t i = 0; i < stories.size(); ++i) {
    if (!slots[i].mplot) {
      ++output.skipped;
      continue;
    }
    LabeledExample positive = make_positive(stories[i]);
    TokenList text = std::move(slots[i].text);
    ManipulatedPlot mplot = std::move(*slots[i].mplot);
    for (int attempt = 1; text == positive.text && attempt < 32; ++attempt) {
      mplot = compose_at(i, attempt);
      text = realize_at(i, mplot, attempt);
    }
    if (text == positive.text) {
      ++output.skipped;
      continue;
    }
    LabeledExample negative;
    negative.text = std::move(text);
    negative.label = Label::kImplausible;
    negative.provenance = Provenance::kManPlts;
    negative.source_id = stories[i].id;
    negative.manipulations = std::move(mplot.records);
    output.examples.push_back(std::move(positive));
    output.examples.push_back(std::move(negative));
  }
  return output;
}

StrategyOutput build_af_manplts(std::span<const Story> stories, std::span<const Plot> plots,
                                const TripleStore& store, const Generator& generator,
                                const ComposeConfig& cfg, const Options& options,
                                const std::filesystem::path& out_dir) {
  BuiltCandidates built =
      build_candidate_sets(stories, plots, store, generator, cfg, options.n, options.seed);
  if (built.sets.empty()) throw Error("no feasible stories for af_manplts");

  AFConfig af_cfg;
  af_cfg.fold_fraction = options.fold_fraction;
  af_cfg.easy_margin = options.easy_margin;
  af_cfg.max_iters = options.max_iters;
  af_cfg.min_swap_fraction = options.min_swap_fraction;
  auto [assignment, trace] =
      run_af(built.sets, options.a, af_cfg, mix_seed(options.seed, stable_hash64("af")));
  write_af_report(trace, out_dir / "af-report.jsonl");

  std::map<std::string, const Story*> by_id;
  for (const auto& story : stories) by_id[story.id] = &story;

  StrategyOutput output;
  output.skipped = built.infeasible_ids.size();
  for (std::size_t c = 0; c < built.sets.size(); ++c) {
    const CandidateSet& set = built.sets[c];
    output.examples.push_back(make_positive(*by_id.at(set.source_id)));
    for (const int slot : assignment.contexts[c].assigned) {
      LabeledExample negative;
      negative.text = set.candidates[static_cast<std::size_t>(slot)];
      negative.label = Label::kImplausible;
      negative.provenance = Provenance::kAfManPlts;
      negative.source_id = set.source_id;
      negative.manipulations = built.records[c][static_cast<std::size_t>(slot)];
      output.examples.push_back(std::move(negative));
    }
  }
  return output;
}

std::string svg_line_chart(std::span<const AFStats> stats) {
  constexpr double kWidth = 640, kHeight = 360;
  constexpr double kLeft = 60, kRight = 20, kTop = 20, kBottom = 40;
  const double plot_w = kWidth - kLeft - kRight;
  const double plot_h = kHeight - kTop - kBottom;
  const std::size_t n = stats.size();

  auto x_at = [&](std::size_t i) {
    return n <= 1 ? kLeft + plot_w / 2
                  : kLeft + plot_w * static_cast<double>(i) / static_cast<double>(n - 1);
  };
  auto y_at = [&](double value) {
    const double v = std::clamp(value, 0.0, 1.0);
    return kTop + (1.0 - v) * plot_h;
  };

  char buffer[256];
  std::string svg;
  std::snprintf(buffer, sizeof(buffer),
                "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"%.0f\" height=\"%.0f\" "
                "viewBox=\"0 0 %.0f %.0f\">\n",
                kWidth, kHeight, kWidth, kHeight);
  svg += buffer;
  std::snprintf(buffer, sizeof(buffer),
                "  <line x1=\"%.2f\" y1=\"%.2f\" x2=\"%.2f\" y2=\"%.2f\" stroke=\"black\"/>\n",
                kLeft, kTop, kLeft, kTop + plot_h);
  svg += buffer;
  std::snprintf(buffer, sizeof(buffer),
                "  <line x1=\"%.2f\" y1=\"%.2f\" x2=\"%.2f\" y2=\"%.2f\" stroke=\"black\"/>\n",
                kLeft, kTop + plot_h, kLeft + plot_w, kTop + plot_h);
  svg += buffer;
  for (const double tick : {0.0, 0.5, 1.0}) {
    std::snprintf(buffer, sizeof(buffer),
                  "  <text x=\"%.2f\" y=\"%.2f\" font-size=\"12\" text-anchor=\"end\">%.1f</text>\n",
                  kLeft - 6, y_at(tick) + 4, tick);
    svg += buffer;
  }
  std::snprintf(buffer, sizeof(buffer),
                "  <text x=\"%.2f\" y=\"%.2f\" font-size=\"12\">mean assigned score per iteration</text>\n",
                kLeft, kHeight - 8);
  svg += buffer;
  svg += "  <polyline fill=\"none\" stroke=\"steelblue\" stroke-width=\"2\" points=\"";
  for (std::size_t i = 0; i < n; ++i) {
    std::snprintf(buffer, sizeof(buffer), "%s%.2f,%.2f", i ? " " : "", x_at(i),
                  y_at(stats[i].mean_assigned_score));
    svg += buffer;
  }
  svg += "\"/>\n</svg>\n";
  return svg;
}

}  // namespace

void apply_config_file(const std::string& path, Options& options) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config: " + path);
  json doc = json::parse(in, nullptr, false);
  if (doc.is_discarded() || !doc.is_object())
    throw ParseError("config must be a json object: " + path);

  for (const auto& [key, value] : doc.items()) {
    if (key == "seed") options.seed = value.get<std::uint64_t>();
    else if (key == "threads") options.threads = value.get<unsigned>();
    else if (key == "corpus") options.corpus = value.get<std::string>();
    else if (key == "format") options.format = value.get<std::string>();
    else if (key == "strategy") options.strategy = value.get<std::string>();
    else if (key == "out") options.out = value.get<std::string>();
    else if (key == "triples") options.triples = value.get<std::string>();
    else if (key == "stopwords") options.stopwords = value.get<std::string>();
    else if (key == "verbs") options.verbs = value.get<std::string>();
    else if (key == "generator") options.generator = value.get<std::string>();
    else if (key == "n") options.n = value.get<int>();
    else if (key == "a") options.a = value.get<int>();
    else if (key == "sent-frac") options.sent_frac = value.get<double>();
    else if (key == "key-frac") options.key_frac = value.get<double>();
    else if (key == "item-frac") options.item_frac = value.get<double>();
    else if (key == "p-conn") options.p_conn = value.get<double>();
    else if (key == "copies") options.copies = value.get<int>();
    else if (key == "top-k") options.top_k = value.get<int>();
    else if (key == "temperature") options.temperature = value.get<double>();
    else if (key == "max-len") options.max_len = value.get<int>();
    else if (key == "ngram-order") options.ngram_order = value.get<int>();
    else if (key == "easy-margin") options.easy_margin = value.get<double>();
    else if (key == "max-iters") options.max_iters = value.get<int>();
    else if (key == "min-swap-fraction") options.min_swap_fraction = value.get<double>();
    else if (key == "fold-fraction") options.fold_fraction = value.get<double>();
    else if (key == "train-ratio") options.train_ratio = value.get<double>();
    else if (key == "valid-ratio") options.valid_ratio = value.get<double>();
    else if (key == "lm-fraction") options.lm_fraction = value.get<double>();
    else if (key == "per-sentence") options.per_sentence = value.get<int>();
    else if (key == "plot-extractor") options.plot_extractor = value.get<std::string>();
    else if (key == "generator-timeout-ms") options.generator_timeout_ms = value.get<long>();
    else if (key == "data") options.data = value.get<std::string>();
    else if (key == "model") options.model = value.get<std::string>();
    else if (key == "epochs") options.epochs = value.get<int>();
    else if (key == "lr") options.lr = value.get<double>();
    else if (key == "hash-dims") options.hash_dims = value.get<int>();
    else if (key == "input") options.input = value.get<std::string>();
    else if (key == "scores") options.scores = value.get<std::string>();
    else if (key == "judgments") options.judgments = value.get<std::string>();
    else if (key == "bootstrap") options.bootstrap = value.get<int>();
    else throw ParseError("unknown config key: " + key);
  }
}

namespace {

void require_option(const std::string& value, const char* flag) {
  if (value.empty()) throw UsageError(std::string("missing required option ") + flag);
}

}  // namespace

int cmd_build(const Options& options) {
  require_option(options.corpus, "--corpus");
  require_option(options.strategy, "--strategy");
  require_option(options.out, "--out");
  const unsigned threads = options.threads == 0 ? default_worker_count() : options.threads;
  const auto loaded = load_stories(options.corpus, parse_format(options.format));
  if (loaded.skipped_empty > 0)
    std::cerr << "skipped " << loaded.skipped_empty << " empty stories\n";

  std::vector<Story> lm_stories;
  std::vector<Story> eval_stories;
  if (options.lm_fraction > 0.0) {
    auto [lm, eval] = split_corpus(loaded.stories, options.lm_fraction, options.seed);
    lm_stories = std::move(lm);
    eval_stories = std::move(eval);
  } else {
    lm_stories = loaded.stories;
    eval_stories = loaded.stories;
  }
  if (eval_stories.empty()) throw Error("no stories to build from");

  TripleStore store;
  if (!options.triples.empty()) store = TripleStore::load(options.triples);
  const auto stopwords = load_optional_wordlist(options.stopwords, default_stopwords());
  const auto verbs = load_optional_wordlist(options.verbs, {});

  std::optional<NGramModel> ngram_model;
  if (options.generator == "ngram")
    ngram_model.emplace(NGramModel::train(lm_stories, options.ngram_order));
  const Generator generator = make_generator(options, ngram_model ? &*ngram_model : nullptr);

  ComposeConfig compose_cfg;
  compose_cfg.item_fraction = options.item_frac;
  compose_cfg.p_conn = options.p_conn;
  compose_cfg.copies = options.copies;

  const std::filesystem::path out_dir(options.out);
  std::filesystem::create_directories(out_dir);

  StrategyOutput output;
  if (options.strategy == "heur_sent_sub") {
    output = per_story_pairs(
        eval_stories,
        [&](const Story& story, Rng& rng) {
          return heur_sent_sub(story, eval_stories, rng, options.sent_frac);
        },
        options.strategy, options.seed, threads);
  } else if (options.strategy == "heur_key_sub") {
    output = per_story_pairs(
        eval_stories,
        [&](const Story& story, Rng& rng) {
          return heur_key_sub(story, store, rng, options.key_frac, stopwords);
        },
        options.strategy, options.seed, threads);
  } else if (options.strategy == "union") {
    output = per_story_pairs(
        eval_stories,
        [&](const Story& story, Rng& rng) {
          return union_manipulate(story, store, eval_stories, rng, stopwords, verbs);
        },
        options.strategy, options.seed, threads);
  } else if (options.strategy == "manplts" || options.strategy == "af_manplts") {
    const auto plots = extract_plots(eval_stories, options, stopwords, verbs, threads);
    if (options.strategy == "manplts") {
      output =
          build_manplts(eval_stories, plots, store, generator, compose_cfg, options.seed, threads);
    } else {
      output =
          build_af_manplts(eval_stories, plots, store, generator, compose_cfg, options, out_dir);
    }
  } else {
    throw UsageError("unknown strategy: " + options.strategy +
                " (expected heur_sent_sub, heur_key_sub, union, manplts or af_manplts)");
  }

  std::size_t positives = 0, negatives = 0;
  for (const auto& example : output.examples)
    (example.label == Label::kPlausible ? positives : negatives) += 1;

  DatasetSplit split = split_examples(std::move(output.examples), options.train_ratio,
                                      options.valid_ratio, options.seed);
  write_dataset(split, out_dir);
  std::cout << "strategy " << options.strategy << ": " << positives << " positives, " << negatives
            << " negatives, " << output.skipped << " stories skipped\n";
  std::cout << "wrote " << (out_dir / "train.jsonl").string() << " (" << split.train.size()
            << "), valid (" << split.valid.size() << "), test (" << split.test.size() << ")\n";
  return 0;
}

namespace {

std::pair<std::vector<TokenList>, std::vector<TokenList>> split_by_label(
    std::span<const LabeledExample> examples) {
  std::pair<std::vector<TokenList>, std::vector<TokenList>> out;
  for (const auto& example : examples)
    (example.label == Label::kPlausible ? out.first : out.second).push_back(example.text);
  return out;
}

void print_accuracy(const char* name, const LinearModel& model,
                    std::span<const LabeledExample> examples) {
  if (examples.empty()) {
    std::cout << name << " accuracy: n/a (empty)\n";
    return;
  }
  const auto [pos, neg] = split_by_label(examples);
  char buffer[64];
  std::snprintf(buffer, sizeof(buffer), "%.4f", accuracy(model, pos, neg));
  std::cout << name << " accuracy: " << buffer << "\n";
}

}  // namespace

int cmd_train(const Options& options) {
  require_option(options.data, "--data");
  require_option(options.model, "--model");
  const DatasetSplit split = read_dataset(options.data);
  if (split.train.empty()) throw Error("train split is empty");
  const auto [positives, negatives] = split_by_label(split.train);
  FeatureConfig cfg;
  cfg.hash_dims = options.hash_dims;
  const LinearModel model =
      train_classifier(positives, negatives, cfg, options.epochs, options.lr, options.seed);
  print_accuracy("train", model, split.train);
  print_accuracy("valid", model, split.valid);
  print_accuracy("test", model, split.test);
  save_model(model, options.model);
  std::cout << "model written to " << options.model << "\n";
  return 0;
}

int cmd_score(const Options& options) {
  require_option(options.model, "--model");
  require_option(options.input, "--input");
  require_option(options.scores_out, "--out");
  const LinearModel model = load_model(options.model);
  const auto loaded = load_stories(options.input, StoryFormat::kJsonl);
  std::map<std::string, double> scores;
  for (const auto& story : loaded.stories)
    scores[story.id] = score(model, flatten_story(story.sentences));
  write_scores(scores, options.scores_out);
  std::cout << "scored " << scores.size() << " texts -> " << options.scores_out << "\n";
  return 0;
}

int cmd_evaluate(const Options& options) {
  require_option(options.scores, "--scores");
  require_option(options.judgments, "--judgments");
  const auto scores = load_scores(options.scores);
  const auto judged = load_judgments(options.judgments);
  const CorrelationReport report =
      evaluate_metric(scores, judged, options.bootstrap, options.seed);
  std::cout << report_table(report);
  if (options.report_out.empty()) {
    std::cout << report_to_json(report) << "\n";
  } else {
    std::ofstream out(options.report_out);
    if (!out) throw IoError("cannot write " + options.report_out);
    out << report_to_json(report) << '\n';
    std::cout << "report written to " << options.report_out << "\n";
  }
  return 0;
}

int cmd_af_report(const Options& options) {
  require_option(options.report_in, "--input");
  const auto stats = read_af_report(options.report_in);
  if (stats.empty()) {
    std::cout << "no iterations\n";
    return 0;
  }
  char buffer[160];
  std::snprintf(buffer, sizeof(buffer), "%-10s %8s %20s %20s\n", "iteration", "swaps",
                "mean_assigned_score", "valid_accuracy");
  std::cout << buffer;
  for (const auto& row : stats) {
    std::snprintf(buffer, sizeof(buffer), "%-10d %8d %20.4f %20.4f\n", row.iteration, row.swaps,
                  row.mean_assigned_score, row.classifier_valid_accuracy);
    std::cout << buffer;
  }
  if (!options.svg.empty()) {
    std::ofstream out(options.svg);
    if (!out) throw IoError("cannot write " + options.svg);
    out << svg_line_chart(stats);
    std::cout << "chart written to " << options.svg << "\n";
  }
  return 0;
}

}  // namespace implausify::cli
