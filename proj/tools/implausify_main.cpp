#include <exception>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "commands.hpp"
#include "implausify/errors.hpp"

namespace {

using implausify::cli::Options;

/// The config file seeds option defaults before CLI11 parses, so explicit
/// flags always win.
std::string find_config_argument(int argc, char** argv) {
  for (int i = 1; i < argc; ++i) {
    const std::string arg = argv[i];
    if (arg == "--config" && i + 1 < argc) return argv[i + 1];
    if (arg.rfind("--config=", 0) == 0) return arg.substr(std::string("--config=").size());
  }
  return {};
}

void add_common(CLI::App* cmd, Options& options) {
  cmd->add_option("--config", "json config file; flags override its values")
      ->type_name("FILE");
  cmd->add_option("--seed", options.seed, "global random seed");
  cmd->add_option("--threads", options.threads, "worker threads (0 = auto)");
}

}  // namespace

int main(int argc, char** argv) {
  Options options;
  try {
    const std::string config_path = find_config_argument(argc, argv);
    if (!config_path.empty()) implausify::cli::apply_config_file(config_path, options);
  } catch (const implausify::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }

  CLI::App app{"implausible-story training data construction and metric evaluation"};
  app.require_subcommand(1);

  auto* build = app.add_subcommand("build", "construct a labeled dataset from a story corpus");
  add_common(build, options);
  build->add_option("--corpus", options.corpus, "story corpus file");
  build->add_option("--format", options.format, "corpus format: jsonl or plain");
  build->add_option("--strategy", options.strategy,
                    "heur_sent_sub, heur_key_sub, union, manplts or af_manplts");
  build->add_option("--out", options.out, "output dataset directory");
  build->add_option("--triples", options.triples, "relation triple tsv");
  build->add_option("--stopwords", options.stopwords, "stopword file (one per line)");
  build->add_option("--verbs", options.verbs, "verb lexicon file (one per line)");
  build->add_option("--generator", options.generator, "template, ngram or external:<cmd>");
  build->add_option("--n", options.n, "candidates per story for adversarial filtering");
  build->add_option("--a", options.a, "hard negatives kept per story");
  build->add_option("--sent-frac", options.sent_frac, "sentence substitution fraction");
  build->add_option("--key-frac", options.key_frac, "keyword substitution fraction");
  build->add_option("--item-frac", options.item_frac, "plot item manipulation fraction");
  build->add_option("--p-conn", options.p_conn, "connective probability in reordering");
  build->add_option("--copies", options.copies, "repeat copies (standalone repeat)");
  build->add_option("--top-k", options.top_k, "sampling top-k");
  build->add_option("--temperature", options.temperature, "sampling temperature");
  build->add_option("--max-len", options.max_len, "generation length cap in tokens");
  build->add_option("--ngram-order", options.ngram_order, "ngram generator order");
  build->add_option("--easy-margin", options.easy_margin, "easy-candidate score margin");
  build->add_option("--max-iters", options.max_iters, "adversarial filtering iteration cap");
  build->add_option("--min-swap-fraction", options.min_swap_fraction,
                    "stop when swaps/slots falls below this");
  build->add_option("--fold-fraction", options.fold_fraction, "train fold share per iteration");
  build->add_option("--train-ratio", options.train_ratio, "train partition share");
  build->add_option("--valid-ratio", options.valid_ratio, "valid partition share");
  build->add_option("--lm-fraction", options.lm_fraction,
                    "share of stories reserved for generator training (0 = use all)");
  build->add_option("--per-sentence", options.per_sentence, "keywords per sentence");
  build->add_option("--plot-extractor", options.plot_extractor, "storyline or verbarg");
  build->add_option("--generator-timeout-ms", options.generator_timeout_ms,
                    "external generator timeout");

  auto* train = app.add_subcommand("train", "fit the plausibility classifier on a dataset");
  add_common(train, options);
  train->add_option("--data", options.data, "dataset directory");
  train->add_option("--model", options.model, "output model file");
  train->add_option("--epochs", options.epochs, "sgd epochs");
  train->add_option("--lr", options.lr, "sgd learning rate");
  train->add_option("--hash-dims", options.hash_dims, "feature hashing dimensions");

  auto* score = app.add_subcommand("score", "score texts with a trained model");
  add_common(score, options);
  score->add_option("--model", options.model, "model file");
  score->add_option("--input", options.input, "stories jsonl to score");
  score->add_option("--out", options.scores_out, "output scores.jsonl");

  auto* evaluate = app.add_subcommand("evaluate", "correlate metric scores with human judgments");
  add_common(evaluate, options);
  evaluate->add_option("--scores", options.scores, "scores.jsonl");
  evaluate->add_option("--judgments", options.judgments, "judgments.jsonl");
  evaluate->add_option("--bootstrap", options.bootstrap, "bootstrap resamples (0 = off)");
  evaluate->add_option("--out", options.report_out, "report json output path");

  auto* report = app.add_subcommand("af-report", "summarize an adversarial filtering report");
  add_common(report, options);
  report->add_option("--input", options.report_in, "af-report.jsonl");
  report->add_option("--svg", options.svg, "line chart output path");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }

  try {
    if (build->parsed()) return implausify::cli::cmd_build(options);
    if (train->parsed()) return implausify::cli::cmd_train(options);
    if (score->parsed()) return implausify::cli::cmd_score(options);
    if (evaluate->parsed()) return implausify::cli::cmd_evaluate(options);
    if (report->parsed()) return implausify::cli::cmd_af_report(options);
  } catch (const implausify::UsageError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const implausify::IoError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const implausify::ParseError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const implausify::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
