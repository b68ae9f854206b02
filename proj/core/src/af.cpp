#include "implausify/af.hpp"

#include <algorithm>
#include <fstream>

#include <json.hpp>

#include "implausify/errors.hpp"

namespace implausify {

using nlohmann::json;

Assignment af_init(std::span<const CandidateSet> sets, int a, std::uint64_t seed) {
  Assignment assignment;
  assignment.a = a;
  assignment.contexts.reserve(sets.size());
  Rng rng(mix_seed(seed, stable_hash64("af_init")));
  for (const auto& set : sets) {
    const int n = static_cast<int>(set.candidates.size());
    if (a < 1 || a >= n)
      throw Error("assignment size A=" + std::to_string(a) + " must satisfy 1 <= A < N=" +
                  std::to_string(n) + " (context " + set.source_id + ")");
    std::vector<int> indices(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) indices[static_cast<std::size_t>(i)] = i;
    rng.shuffle(indices);
    ContextAssignment context;
    context.assigned.assign(indices.begin(), indices.begin() + a);
    context.unassigned.assign(indices.begin() + a, indices.end());
    std::sort(context.assigned.begin(), context.assigned.end());
    std::sort(context.unassigned.begin(), context.unassigned.end());
    assignment.contexts.push_back(std::move(context));
  }
  return assignment;
}

int apply_swap_rule(ContextAssignment& assignment, const ContextScores& scores, double margin,
                    int context_index, std::vector<SwapRecord>* log) {
  struct Easy {
    int candidate;
    double score;
  };
  std::vector<Easy> easy;
  for (const int candidate : assignment.assigned) {
    const double s = scores.candidates[static_cast<std::size_t>(candidate)];
    if (s < scores.positive - margin) easy.push_back({candidate, s});
  }
  std::sort(easy.begin(), easy.end(), [](const Easy& a, const Easy& b) {
    if (a.score != b.score) return a.score < b.score;
    return a.candidate < b.candidate;
  });

  int swaps = 0;
  for (const auto& [candidate, easy_score] : easy) {
    int best = -1;
    double best_score = easy_score;
    for (const int challenger : assignment.unassigned) {
      const double s = scores.candidates[static_cast<std::size_t>(challenger)];
      if (s > best_score) {
        best = challenger;
        best_score = s;
      }
    }
    if (best < 0) continue;  // nothing strictly better remains
    std::erase(assignment.assigned, candidate);
    std::erase(assignment.unassigned, best);
    assignment.assigned.insert(
        std::lower_bound(assignment.assigned.begin(), assignment.assigned.end(), best), best);
    assignment.unassigned.insert(
        std::lower_bound(assignment.unassigned.begin(), assignment.unassigned.end(), candidate),
        candidate);
    ++swaps;
    if (log) log->push_back({context_index, candidate, best, easy_score, best_score});
  }
  return swaps;
}

AFStats af_iteration(Assignment& assignment, std::span<const CandidateSet> sets,
                     const AFConfig& cfg, std::span<const std::size_t> train_fold,
                     std::span<const std::size_t> replace_fold, std::uint64_t classifier_seed,
                     int iteration) {
  if (assignment.contexts.size() != sets.size())
    throw Error("assignment does not match candidate sets");
  if (train_fold.empty() || replace_fold.empty()) throw Error("degenerate fold");

  std::vector<TokenList> positives;
  std::vector<TokenList> negatives;
  for (const std::size_t i : train_fold) {
    positives.push_back(sets[i].positive_text);
    for (const int candidate : assignment.contexts[i].assigned)
      negatives.push_back(sets[i].candidates[static_cast<std::size_t>(candidate)]);
  }
  const LinearModel model =
      train_classifier(positives, negatives, cfg.features, cfg.epochs, cfg.learning_rate,
                       classifier_seed);

  // Scores for every context; the replace fold drives swaps, all contexts
  // feed the mean-assigned-score statistic.
  std::vector<ContextScores> scores(sets.size());
  for (std::size_t i = 0; i < sets.size(); ++i) {
    scores[i].positive = score(model, sets[i].positive_text);
    scores[i].candidates.reserve(sets[i].candidates.size());
    for (const auto& candidate : sets[i].candidates)
      scores[i].candidates.push_back(score(model, candidate));
  }

  AFStats stats;
  stats.iteration = iteration;

  std::size_t valid_correct = 0;
  std::size_t valid_total = 0;
  for (const std::size_t i : replace_fold) {
    valid_correct += scores[i].positive >= 0.5;
    ++valid_total;
    for (const int candidate : assignment.contexts[i].assigned) {
      valid_correct += scores[i].candidates[static_cast<std::size_t>(candidate)] < 0.5;
      ++valid_total;
    }
  }
  stats.classifier_valid_accuracy =
      valid_total == 0 ? 0.0 : static_cast<double>(valid_correct) / static_cast<double>(valid_total);

  for (const std::size_t i : replace_fold) {
    stats.swaps += apply_swap_rule(assignment.contexts[i], scores[i], cfg.easy_margin,
                                   static_cast<int>(i), &stats.swap_log);
  }

  double total = 0.0;
  std::size_t slots = 0;
  for (std::size_t i = 0; i < sets.size(); ++i) {
    for (const int candidate : assignment.contexts[i].assigned) {
      total += scores[i].candidates[static_cast<std::size_t>(candidate)];
      ++slots;
    }
  }
  stats.mean_assigned_score = slots == 0 ? 0.0 : total / static_cast<double>(slots);

  if (cfg.observer) cfg.observer(model, stats);
  return stats;
}

namespace {

std::pair<std::vector<std::size_t>, std::vector<std::size_t>> fold_split(std::size_t n,
                                                                         double fold_fraction,
                                                                         Rng& rng) {
  if (n < 2) throw Error("degenerate fold");
  std::vector<std::size_t> order(n);
  for (std::size_t i = 0; i < n; ++i) order[i] = i;
  rng.shuffle(order);
  auto train_size = static_cast<std::size_t>(std::clamp<long long>(
      std::llround(fold_fraction * static_cast<double>(n)), 1, static_cast<long long>(n) - 1));
  std::vector<std::size_t> train(order.begin(), order.begin() + static_cast<long>(train_size));
  std::vector<std::size_t> replace(order.begin() + static_cast<long>(train_size), order.end());
  return {std::move(train), std::move(replace)};
}

}  // namespace

AFStats af_iteration(Assignment& assignment, std::span<const CandidateSet> sets,
                     const AFConfig& cfg, Rng& rng, int iteration) {
  auto [train_fold, replace_fold] = fold_split(sets.size(), cfg.fold_fraction, rng);
  return af_iteration(assignment, sets, cfg, train_fold, replace_fold, rng.next_u64(), iteration);
}

std::pair<Assignment, std::vector<AFStats>> run_af(std::span<const CandidateSet> sets, int a,
                                                   const AFConfig& cfg, std::uint64_t seed) {
  Assignment assignment = af_init(sets, a, seed);
  std::vector<AFStats> trace;
  const std::size_t total_slots = sets.size() * static_cast<std::size_t>(a);
  for (int iteration = 0; iteration < cfg.max_iters; ++iteration) {
    // One fold partition per iteration pair, roles alternating within it.
    Rng fold_rng(mix_seed(mix_seed(seed, stable_hash64("fold")),
                          static_cast<std::uint64_t>(iteration / 2)));
    auto [first, second] = fold_split(sets.size(), cfg.fold_fraction, fold_rng);
    const bool invert = iteration % 2 == 1;
    const auto& train_fold = invert ? second : first;
    const auto& replace_fold = invert ? first : second;
    const std::uint64_t clf_seed =
        mix_seed(mix_seed(seed, stable_hash64("clf")), static_cast<std::uint64_t>(iteration));
    AFStats stats =
        af_iteration(assignment, sets, cfg, train_fold, replace_fold, clf_seed, iteration);
    const double swap_fraction =
        total_slots == 0 ? 0.0 : static_cast<double>(stats.swaps) / static_cast<double>(total_slots);
    trace.push_back(std::move(stats));
    if (swap_fraction < cfg.min_swap_fraction) break;
  }
  return {std::move(assignment), std::move(trace)};
}

void write_af_report(std::span<const AFStats> stats, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path.string());
  for (const auto& row : stats) {
    out << json{{"iteration", row.iteration},
                {"swaps", row.swaps},
                {"mean_assigned_score", row.mean_assigned_score},
                {"classifier_valid_accuracy", row.classifier_valid_accuracy}}
               .dump()
        << '\n';
  }
}

std::vector<AFStats> read_af_report(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());
  std::vector<AFStats> stats;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    json row = json::parse(line, nullptr, false);
    if (row.is_discarded() || !row.contains("iteration") || !row.contains("swaps") ||
        !row.contains("mean_assigned_score"))
      throw ParseError("line " + std::to_string(lineno) + ": malformed af-report row");
    AFStats s;
    s.iteration = row["iteration"].get<int>();
    s.swaps = row["swaps"].get<int>();
    s.mean_assigned_score = row["mean_assigned_score"].get<double>();
    s.classifier_valid_accuracy = row.value("classifier_valid_accuracy", 0.0);
    stats.push_back(std::move(s));
  }
  return stats;
}

}  // namespace implausify
