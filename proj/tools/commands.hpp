#pragma once

#include <cstdint>
#include <string>

namespace implausify::cli {

/// Union of all subcommand options; each subcommand binds its subset.
/// A JSON config file seeds these fields, then command-line flags win.
struct Options {
  // shared
  std::uint64_t seed = 0;
  unsigned threads = 0;  // 0 = auto

  // build
  std::string corpus;
  std::string format = "jsonl";
  std::string strategy;
  std::string out;
  std::string triples;
  std::string stopwords;
  std::string verbs;
  std::string generator = "template";
  int n = 6;
  int a = 3;
  double sent_frac = 0.5;
  double key_frac = 0.15;
  double item_frac = 0.15;
  double p_conn = 0.5;
  int copies = 2;
  int top_k = 50;
  double temperature = 0.8;
  int max_len = 200;
  int ngram_order = 3;
  double easy_margin = 0.3;
  int max_iters = 10;
  double min_swap_fraction = 0.01;
  double fold_fraction = 0.5;
  double train_ratio = 0.8;
  double valid_ratio = 0.1;
  double lm_fraction = 0.0;
  int per_sentence = 1;
  std::string plot_extractor = "storyline";
  long generator_timeout_ms = 30000;

  // train / score
  std::string data;
  std::string model;
  int epochs = 20;
  double lr = 0.1;
  int hash_dims = 1 << 20;
  std::string input;
  std::string scores_out;

  // evaluate
  std::string scores;
  std::string judgments;
  int bootstrap = 0;
  std::string report_out;

  // af-report
  std::string report_in;
  std::string svg;
};

/// Loads a JSON config file into `options`. Unknown keys are rejected.
void apply_config_file(const std::string& path, Options& options);

int cmd_build(const Options& options);
int cmd_train(const Options& options);
int cmd_score(const Options& options);
int cmd_evaluate(const Options& options);
int cmd_af_report(const Options& options);

}  // namespace implausify::cli
