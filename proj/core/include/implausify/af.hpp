#pragma once

#include <functional>

#include "implausify/classifier.hpp"
#include "implausify/realize.hpp"

namespace implausify {

/// Per-context partition of the N candidate indices into the A assigned
/// (hard-negative) slots and the rest.
struct ContextAssignment {
  std::vector<int> assigned;    // sorted
  std::vector<int> unassigned;  // sorted
};

struct Assignment {
  std::vector<ContextAssignment> contexts;  // parallel to the candidate sets
  int a = 0;
};

struct SwapRecord {
  int context = 0;
  int removed = 0;  // candidate index leaving the assigned set
  int inserted = 0;
  double removed_score = 0;
  double inserted_score = 0;
};

struct AFStats {
  int iteration = 0;
  int swaps = 0;
  double mean_assigned_score = 0;         // post-swap, under this iteration's classifier
  double classifier_valid_accuracy = 0;   // replace-fold accuracy, pre-swap
  std::vector<SwapRecord> swap_log;
};

struct AFConfig {
  double fold_fraction = 0.5;
  double easy_margin = 0.3;
  FeatureConfig features;
  int epochs = 20;
  double learning_rate = 0.1;
  int max_iters = 10;
  double min_swap_fraction = 0.01;
  /// Invoked once per iteration with the trained classifier and the
  /// iteration's stats, before the model is discarded. For auditing.
  std::function<void(const LinearModel&, const AFStats&)> observer;
};

/// Scores of one context under one classifier.
struct ContextScores {
  double positive = 0;
  std::vector<double> candidates;
};

/// Uniform random A-subset per context. Throws Error when A is out of
/// range for any set.
Assignment af_init(std::span<const CandidateSet> sets, int a, std::uint64_t seed);

/// The replacement rule of one iteration, applied to one context: every
/// assigned candidate scoring below positive - margin is swapped with the
/// highest-scoring unassigned candidate that strictly beats it. Easiest
/// candidates are processed first. Returns the number of swaps.
int apply_swap_rule(ContextAssignment& assignment, const ContextScores& scores, double margin,
                    int context_index, std::vector<SwapRecord>* log);

/// One AF iteration: train on the fold's human texts vs assigned
/// candidates, then run the swap rule on the replace fold.
AFStats af_iteration(Assignment& assignment, std::span<const CandidateSet> sets,
                     const AFConfig& cfg, std::span<const std::size_t> train_fold,
                     std::span<const std::size_t> replace_fold, std::uint64_t classifier_seed,
                     int iteration);

/// Convenience form drawing the fold split and classifier seed from `rng`.
AFStats af_iteration(Assignment& assignment, std::span<const CandidateSet> sets,
                     const AFConfig& cfg, Rng& rng, int iteration = 0);

/// Full loop: random initial assignment, then iterations with fold roles
/// alternating per iteration, stopping when swaps/total_slots falls below
/// min_swap_fraction or max_iters is reached.
std::pair<Assignment, std::vector<AFStats>> run_af(std::span<const CandidateSet> sets, int a,
                                                   const AFConfig& cfg, std::uint64_t seed);

void write_af_report(std::span<const AFStats> stats, const std::filesystem::path& path);
std::vector<AFStats> read_af_report(const std::filesystem::path& path);

}  // namespace implausify
