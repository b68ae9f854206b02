#pragma once

#include <chrono>
#include <variant>

#include "implausify/ngram.hpp"
#include "implausify/plot_manip.hpp"

namespace implausify {

struct GenConfig {
  int top_k = 50;
  double temperature = 0.8;
  int max_len = 200;
  std::uint64_t seed = 0;
};

void validate(const GenConfig& cfg);  // throws Error on bad fields

/// N realized negative candidates for one source story.
struct CandidateSet {
  std::string source_id;
  TokenList positive_text;
  std::vector<TokenList> candidates;
  int n = 0;
};

/// Deterministic surrogate realizer: each plot line becomes one sentence,
/// "someone" + the line's items in order (keyword/inserted items prefixed
/// with "the") + ".".
TokenList realize_template(const ManipulatedPlot& mplot);

/// LM surrogate realizer: plot items are emitted in order with top-k
/// temperature-sampled filler between them. Every item token is guaranteed
/// to appear in its line's sentence; the output never exceeds cfg.max_len
/// tokens (the cap wins over filler, never over items unless the items
/// alone overflow it).
TokenList realize_ngram(const ManipulatedPlot& mplot, const NGramModel& model,
                        const GenConfig& cfg);

struct TemplateGenerator {};

struct NGramGenerator {
  const NGramModel* model = nullptr;
  GenConfig cfg;
};

/// Bridge to an external realizer over a JSONL stdin/stdout protocol.
/// Request rows: {"source_id": str, "lines": [[str, ...], ...]}; response
/// rows: {"source_id": str, "text": str}, matched by source_id in any
/// order. Wire ids are "<index>#<story-id>" so one story may appear many
/// times in a batch.
struct ExternalGenerator {
  std::string command;
  std::chrono::milliseconds timeout{30000};
};

std::vector<TokenList> external_generate(std::span<const ManipulatedPlot> mplots,
                                         const ExternalGenerator& generator);

using Generator = std::variant<TemplateGenerator, NGramGenerator, ExternalGenerator>;

TokenList realize_with(const Generator& generator, const ManipulatedPlot& mplot,
                       std::uint64_t realize_seed);

/// Composes and realizes `n` distinct negative candidates for one story,
/// each under a seed derived from (seed, story id, slot). Candidates are
/// guaranteed to differ from the positive text and from each other.
/// Propagates CompositionInfeasible.
CandidateSet generate_candidates(const Story& story, const Plot& plot, const TripleStore& store,
                                 std::span<const Plot> pool, const Generator& generator,
                                 const ComposeConfig& cfg, int n, std::uint64_t seed);

/// Batch variant used by the pipeline: one external-generator invocation
/// covers every story's candidates; template/ngram realizers run inline.
/// Also returns the manipulation records behind each candidate.
struct BuiltCandidates {
  std::vector<CandidateSet> sets;
  std::vector<std::vector<std::vector<ManipulationRecord>>> records;  // [story][slot]
  std::vector<std::string> infeasible_ids;                            // skipped stories
};

BuiltCandidates build_candidate_sets(std::span<const Story> stories, std::span<const Plot> plots,
                                     const TripleStore& store, const Generator& generator,
                                     const ComposeConfig& cfg, int n, std::uint64_t seed);

}  // namespace implausify
