#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "implausify/text.hpp"

namespace implausify {

/// A text with its human ratings on the 0-5 scale; normalized = mean/5.
struct JudgedText {
  std::string id;
  TokenList text;
  std::vector<int> ratings;
  double normalized = 0.0;
};

/// mean(ratings)/5. Throws Error on an empty list or out-of-range rating.
double normalize_judgments(std::span<const int> ratings);

/// Spearman rho: Pearson correlation of average (tie-shared) ranks.
/// Requires |xs| == |ys| >= 3 and non-constant inputs.
double spearman(std::span<const double> xs, std::span<const double> ys);

/// Kendall tau-b with tie corrections, computed by merge-sort inversion
/// counting in O(n log n). Same preconditions as spearman.
double kendall(std::span<const double> xs, std::span<const double> ys);

/// Fleiss kappa over the six integer rating categories 0..5. Rows are
/// items, columns annotators; every item needs the same number (>= 2) of
/// ratings.
double fleiss_kappa(const std::vector<std::vector<int>>& ratings_matrix);

struct Interval {
  double lo = 0.0;
  double hi = 0.0;
};

struct BootstrapCi {
  Interval rho;
  Interval tau;
  int resamples = 0;
};

struct CorrelationReport {
  double rho = 0.0;
  double tau = 0.0;
  int n = 0;
  int dropped = 0;  // ids present on only one side
  std::optional<BootstrapCi> bootstrap_ci;
};

/// Pairs scores and judgments by id, dropping unmatched entries, and
/// reports rho and tau, optionally with a seeded percentile bootstrap CI.
/// Throws Error when fewer than three pairs match.
CorrelationReport evaluate_metric(const std::map<std::string, double>& scores,
                                  std::span<const JudgedText> judged, int bootstrap = 0,
                                  std::uint64_t seed = 0);

/// judgments.jsonl rows: {"id": str, "text": str, "ratings": [int, ...]}
std::vector<JudgedText> load_judgments(const std::filesystem::path& path);

/// scores.jsonl rows: {"id": str, "score": real}
std::map<std::string, double> load_scores(const std::filesystem::path& path);
void write_scores(const std::map<std::string, double>& scores,
                  const std::filesystem::path& path);

std::string report_to_json(const CorrelationReport& report);
std::string report_table(const CorrelationReport& report);

}  // namespace implausify
