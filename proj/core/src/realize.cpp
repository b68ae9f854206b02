#include "implausify/realize.hpp"

#include <algorithm>
#include <map>

#include <json.hpp>

#include "implausify/errors.hpp"
#include "implausify/subprocess.hpp"

namespace implausify {

using nlohmann::json;

namespace {
constexpr int kMaxGap = 2;          // filler tokens sampled before an item
constexpr int kDistinctAttempts = 32;
}  // namespace

void validate(const GenConfig& cfg) {
  if (cfg.top_k < 1) throw Error("top_k must be >= 1");
  if (!(cfg.temperature > 0.0)) throw Error("temperature must be positive");
  if (cfg.max_len < 1) throw Error("max_len must be >= 1");
}

TokenList realize_template(const ManipulatedPlot& mplot) {
  TokenList out;
  for (const auto& line : mplot.lines) {
    out.emplace_back("someone");
    for (const auto& item : line) {
      if (item.kind != PlotItemKind::kVerb) out.emplace_back("the");
      for (auto& token : split_whitespace(item.surface)) out.push_back(std::move(token));
    }
    out.emplace_back(".");
  }
  return out;
}

TokenList realize_ngram(const ManipulatedPlot& mplot, const NGramModel& model,
                        const GenConfig& cfg) {
  validate(cfg);
  Rng rng(cfg.seed);
  const std::size_t max_len = static_cast<std::size_t>(cfg.max_len);

  // Tokens the plot itself demands: every item token plus one "." per line.
  std::size_t required = mplot.lines.size();
  std::vector<std::vector<TokenList>> item_tokens(mplot.lines.size());
  for (std::size_t l = 0; l < mplot.lines.size(); ++l) {
    for (const auto& item : mplot.lines[l]) {
      item_tokens[l].push_back(split_whitespace(item.surface));
      required += item_tokens[l].back().size();
    }
  }

  TokenList out;
  const std::size_t context_len = static_cast<std::size_t>(std::max(0, model.order() - 1));
  for (std::size_t l = 0; l < mplot.lines.size(); ++l) {
    std::vector<std::string> context(context_len, kSentenceStart);
    auto push_context = [&](const std::string& token) {
      if (context_len == 0) return;
      context.push_back(token);
      context.erase(context.begin());
    };
    auto fill_gap = [&] {
      const std::size_t gap = rng.below(kMaxGap + 1);
      for (std::size_t g = 0; g < gap; ++g) {
        if (out.size() + required >= max_len) return;
        const std::string token = model.sample(context, cfg.top_k, cfg.temperature, rng);
        if (token == kSentenceEnd) return;
        out.push_back(token);
        push_context(token);
      }
    };
    for (const auto& tokens : item_tokens[l]) {
      fill_gap();
      for (const auto& token : tokens) {
        if (out.size() >= max_len) return out;  // cap wins
        out.push_back(token);
        push_context(token);
        --required;
      }
    }
    fill_gap();
    if (out.size() >= max_len) return out;
    out.emplace_back(".");
    --required;
  }
  return out;
}

std::vector<TokenList> external_generate(std::span<const ManipulatedPlot> mplots,
                                         const ExternalGenerator& generator) {
  std::string request;
  std::vector<std::string> wire_ids;
  wire_ids.reserve(mplots.size());
  for (std::size_t i = 0; i < mplots.size(); ++i) {
    wire_ids.push_back(std::to_string(i) + "#" + mplots[i].base.story_id);
    json lines = json::array();
    for (const auto& line : mplots[i].lines) {
      json surfaces = json::array();
      for (const auto& item : line) surfaces.push_back(item.surface);
      lines.push_back(std::move(surfaces));
    }
    request += json{{"source_id", wire_ids.back()}, {"lines", std::move(lines)}}.dump();
    request.push_back('\n');
  }

  const SubprocessResult run = run_subprocess(generator.command, request, generator.timeout);
  if (run.timed_out)
    throw GeneratorProtocolError("generator timed out after " +
                                 std::to_string(generator.timeout.count()) + "ms");
  if (run.exit_code != 0)
    throw GeneratorProtocolError("generator exited with code " + std::to_string(run.exit_code));

  std::map<std::string, std::string> responses;
  std::size_t start = 0;
  while (start < run.stdout_data.size()) {
    std::size_t end = run.stdout_data.find('\n', start);
    if (end == std::string::npos) end = run.stdout_data.size();
    const std::string line = run.stdout_data.substr(start, end - start);
    start = end + 1;
    if (line.empty()) continue;
    json row = json::parse(line, nullptr, false);
    if (row.is_discarded() || !row.contains("source_id") || !row.contains("text"))
      throw GeneratorProtocolError("malformed generator response row: " + line);
    const std::string id = row["source_id"].get<std::string>();
    if (responses.contains(id))
      throw GeneratorProtocolError("duplicate source_id in generator response: " + id);
    responses[id] = row["text"].get<std::string>();
  }

  std::vector<TokenList> out;
  out.reserve(mplots.size());
  for (std::size_t i = 0; i < mplots.size(); ++i) {
    auto it = responses.find(wire_ids[i]);
    if (it == responses.end())
      throw GeneratorProtocolError("generator response missing source_id: " + wire_ids[i]);
    out.push_back(tokenize(it->second));
    responses.erase(it);
  }
  if (!responses.empty())
    throw GeneratorProtocolError("generator response has unknown source_id: " +
                                 responses.begin()->first);
  return out;
}

TokenList realize_with(const Generator& generator, const ManipulatedPlot& mplot,
                       std::uint64_t realize_seed) {
  if (std::holds_alternative<TemplateGenerator>(generator)) return realize_template(mplot);
  if (const auto* ngram = std::get_if<NGramGenerator>(&generator)) {
    GenConfig cfg = ngram->cfg;
    cfg.seed = realize_seed;
    return realize_ngram(mplot, *ngram->model, cfg);
  }
  const auto& external = std::get<ExternalGenerator>(generator);
  return external_generate(std::span<const ManipulatedPlot>(&mplot, 1), external).front();
}

namespace {

ManipulatedPlot compose_for_slot(const Plot& plot, const TripleStore& store,
                                 std::span<const Plot> pool, const ComposeConfig& cfg,
                                 std::uint64_t slot_seed) {
  Rng rng(slot_seed);
  return compose_manipulations(plot, store, pool, rng, cfg);
}

std::uint64_t slot_seed(std::uint64_t seed, const std::string& story_id, int slot, int attempt) {
  return mix_seed(mix_seed(story_seed(seed, story_id), static_cast<std::uint64_t>(slot)),
                  0xA77E0000ULL + static_cast<std::uint64_t>(attempt));
}

bool is_duplicate(const TokenList& candidate, const TokenList& positive,
                  std::span<const TokenList> accepted) {
  if (candidate == positive) return true;
  return std::any_of(accepted.begin(), accepted.end(),
                     [&](const TokenList& other) { return other == candidate; });
}

}  // namespace

CandidateSet generate_candidates(const Story& story, const Plot& plot, const TripleStore& store,
                                 std::span<const Plot> pool, const Generator& generator,
                                 const ComposeConfig& cfg, int n, std::uint64_t seed) {
  if (n < 2) throw Error("candidate count must be >= 2");
  CandidateSet set;
  set.source_id = story.id;
  set.positive_text = flatten_story(story.sentences);
  set.n = n;
  for (int slot = 0; slot < n; ++slot) {
    bool accepted = false;
    for (int attempt = 0; attempt < kDistinctAttempts && !accepted; ++attempt) {
      const std::uint64_t s = slot_seed(seed, story.id, slot, attempt);
      const ManipulatedPlot mplot = compose_for_slot(plot, store, pool, cfg, s);
      TokenList text = realize_with(generator, mplot, mix_seed(s, stable_hash64("realize")));
      if (is_duplicate(text, set.positive_text, set.candidates)) continue;
      set.candidates.push_back(std::move(text));
      accepted = true;
    }
    if (!accepted)
      throw Error("could not realize a distinct candidate for story " + story.id);
  }
  return set;
}

BuiltCandidates build_candidate_sets(std::span<const Story> stories, std::span<const Plot> plots,
                                     const TripleStore& store, const Generator& generator,
                                     const ComposeConfig& cfg, int n, std::uint64_t seed) {
  if (n < 2) throw Error("candidate count must be >= 2");
  if (stories.size() != plots.size()) throw Error("stories/plots size mismatch");
  const bool external = std::holds_alternative<ExternalGenerator>(generator);

  BuiltCandidates built;
  struct Pending {
    std::size_t story;
    int slot;
    ManipulatedPlot mplot;
  };
  std::vector<Pending> pending;
  std::vector<bool> infeasible(stories.size(), false);

  for (std::size_t i = 0; i < stories.size(); ++i) {
    for (int slot = 0; slot < n; ++slot) {
      try {
        pending.push_back(
            {i, slot, compose_for_slot(plots[i], store, plots, cfg,
                                       slot_seed(seed, stories[i].id, slot, 0))});
      } catch (const CompositionInfeasible&) {
        infeasible[i] = true;
        break;
      }
    }
  }
  std::erase_if(pending, [&](const Pending& p) { return infeasible[p.story]; });

  // Realize: one batched call for an external generator, inline otherwise.
  std::vector<TokenList> texts(pending.size());
  if (external) {
    std::vector<ManipulatedPlot> batch;
    batch.reserve(pending.size());
    for (const auto& p : pending) batch.push_back(p.mplot);
    texts = external_generate(batch, std::get<ExternalGenerator>(generator));
  } else {
    for (std::size_t k = 0; k < pending.size(); ++k) {
      const auto& p = pending[k];
      texts[k] = realize_with(generator, p.mplot,
                              mix_seed(slot_seed(seed, stories[p.story].id, p.slot, 0),
                                       stable_hash64("realize")));
    }
  }

  // Assemble per story, re-deriving any duplicate candidates.
  std::vector<CandidateSet> sets(stories.size());
  std::vector<std::vector<std::vector<ManipulationRecord>>> records(stories.size());
  std::vector<std::vector<TokenList>> slot_text(stories.size(), std::vector<TokenList>(n));
  std::vector<std::vector<std::vector<ManipulationRecord>>> slot_records(
      stories.size(), std::vector<std::vector<ManipulationRecord>>(n));
  for (std::size_t k = 0; k < pending.size(); ++k) {
    slot_text[pending[k].story][pending[k].slot] = std::move(texts[k]);
    slot_records[pending[k].story][pending[k].slot] = pending[k].mplot.records;
  }

  for (std::size_t i = 0; i < stories.size(); ++i) {
    if (infeasible[i]) {
      built.infeasible_ids.push_back(stories[i].id);
      continue;
    }
    CandidateSet set;
    set.source_id = stories[i].id;
    set.positive_text = flatten_story(stories[i].sentences);
    set.n = n;
    std::vector<std::vector<ManipulationRecord>> story_records;
    for (int slot = 0; slot < n; ++slot) {
      TokenList text = std::move(slot_text[i][slot]);
      std::vector<ManipulationRecord> recs = std::move(slot_records[i][slot]);
      int attempt = 1;
      while (is_duplicate(text, set.positive_text, set.candidates)) {
        if (attempt >= kDistinctAttempts)
          throw Error("could not realize a distinct candidate for story " + stories[i].id);
        const std::uint64_t s = slot_seed(seed, stories[i].id, slot, attempt);
        ManipulatedPlot mplot = compose_for_slot(plots[i], store, plots, cfg, s);
        text = realize_with(generator, mplot, mix_seed(s, stable_hash64("realize")));
        recs = std::move(mplot.records);
        ++attempt;
      }
      set.candidates.push_back(std::move(text));
      story_records.push_back(std::move(recs));
    }
    sets[i] = std::move(set);
    records[i] = std::move(story_records);
  }

  for (std::size_t i = 0; i < stories.size(); ++i) {
    if (infeasible[i]) continue;
    built.sets.push_back(std::move(sets[i]));
    built.records.push_back(std::move(records[i]));
  }
  return built;
}

}  // namespace implausify
