#include "implausify/plot_manip.hpp"

#include <algorithm>

#include "implausify/errors.hpp"

namespace implausify {

namespace {

struct Position {
  int line;
  int index;
};

std::vector<Position> all_item_positions(const std::vector<PlotLine>& lines) {
  std::vector<Position> positions;
  for (int l = 0; l < static_cast<int>(lines.size()); ++l) {
    for (int i = 0; i < static_cast<int>(lines[l].size()); ++i) positions.push_back({l, i});
  }
  return positions;
}

void insert_item(std::vector<PlotLine>& lines, int line, int index, std::string surface) {
  lines[line].insert(lines[line].begin() + index,
                     PlotItem{std::move(surface), PlotItemKind::kInserted, line});
}

/// Sorts each record's positions ascending, keeping inserted[] aligned.
void sort_record(ManipulationRecord& record) {
  std::vector<std::size_t> order(record.positions.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return record.positions[a] < record.positions[b];
  });
  ManipulationRecord sorted = record;
  for (std::size_t i = 0; i < order.size(); ++i) {
    sorted.positions[i] = record.positions[order[i]];
    sorted.inserted[i] = record.inserted[order[i]];
  }
  record = std::move(sorted);
}

struct OpResult {
  std::vector<PlotLine> lines;
  ManipulationRecord record;
};

std::optional<OpResult> apply_reorder(const std::vector<PlotLine>& lines, const TripleStore& store,
                                      Rng& rng, double p_conn) {
  std::vector<Position> verbs;
  for (const auto& pos : all_item_positions(lines)) {
    const PlotItem& item = lines[pos.line][pos.index];
    if (item.kind == PlotItemKind::kVerb && store.has_ordering_fact(item.surface))
      verbs.push_back(pos);
  }
  if (verbs.empty()) return std::nullopt;
  const Position target = verbs[rng.below(verbs.size())];
  const std::string verb = lines[target.line][target.index].surface;
  auto pair = store.ordered_pair(verb, rng);
  if (!pair) return std::nullopt;

  // Flipped relative to the fact's correct order: second concept first.
  std::vector<std::string> sequence{pair->second};
  std::string detail = "reorder verb=" + verb + " relation=" + to_string(pair->relation);
  if (rng.bernoulli(p_conn)) {
    const std::size_t c = rng.below(std::size(kConnectives));
    sequence.emplace_back(kConnectives[c]);
    detail += " connective=";
    detail += kConnectives[c];
  }
  sequence.push_back(pair->first);

  OpResult result{lines, {}};
  result.record.technique = Technique::kReorder;
  result.record.detail = std::move(detail);
  for (std::size_t k = 0; k < sequence.size(); ++k) {
    const int index = target.index + static_cast<int>(k);
    insert_item(result.lines, target.line, index, sequence[k]);
    result.record.positions.emplace_back(target.line, index);
    result.record.inserted.push_back(sequence[k]);
  }
  return result;
}

std::optional<OpResult> apply_contradict(const std::vector<PlotLine>& lines,
                                         const TripleStore& store, Rng& rng) {
  std::vector<Position> qualifying;
  for (const auto& pos : all_item_positions(lines)) {
    if (!store.contradictions(lines[pos.line][pos.index].surface).empty()) qualifying.push_back(pos);
  }
  if (qualifying.empty()) return std::nullopt;
  const Position target = qualifying[rng.below(qualifying.size())];
  const std::string& item = lines[target.line][target.index].surface;
  const auto candidates = store.contradictions(item);
  const std::string counterpart = candidates[rng.below(candidates.size())];

  OpResult result{lines, {}};
  result.record.technique = Technique::kContradict;
  result.record.detail = "contradict item=" + item + " inserted=" + counterpart;
  insert_item(result.lines, target.line, target.index, counterpart);
  result.record.positions.emplace_back(target.line, target.index);
  result.record.inserted.push_back(counterpart);
  return result;
}

std::optional<OpResult> apply_repeat(const std::vector<PlotLine>& lines, Rng& rng, int copies) {
  const auto positions = all_item_positions(lines);
  if (positions.empty() || copies < 1) return std::nullopt;
  const Position source = positions[rng.below(positions.size())];
  const std::string surface = lines[source.line][source.index].surface;

  OpResult result{lines, {}};
  result.record.technique = Technique::kRepeat;
  result.record.detail = "repeat item=" + surface + " copies=" + std::to_string(copies);
  for (int c = 0; c < copies; ++c) {
    // Uniform over every insertion slot of the current plot state.
    std::size_t slots = 0;
    for (const auto& line : result.lines) slots += line.size() + 1;
    std::size_t slot = rng.below(slots);
    int line = 0;
    while (slot > result.lines[line].size()) {
      slot -= result.lines[line].size() + 1;
      ++line;
    }
    const int index = static_cast<int>(slot);
    insert_item(result.lines, line, index, surface);
    // Earlier copies in the same line at or after this index shift right.
    for (auto& [rl, ri] : result.record.positions) {
      if (rl == line && ri >= index) ++ri;
    }
    result.record.positions.emplace_back(line, index);
    result.record.inserted.push_back(surface);
  }
  sort_record(result.record);
  return result;
}

std::optional<OpResult> apply_rand_sub(const std::vector<PlotLine>& lines,
                                       std::span<const Plot> pool, const std::string& story_id,
                                       Rng& rng, int preferred_max_len) {
  std::vector<const Plot*> donors;
  for (const auto& candidate : pool) {
    if (candidate.story_id == story_id) continue;
    if (std::any_of(candidate.lines.begin(), candidate.lines.end(),
                    [](const PlotLine& line) { return !line.empty(); }))
      donors.push_back(&candidate);
  }
  if (donors.empty() || lines.empty()) return std::nullopt;

  auto surfaces_of = [](const PlotLine& line) {
    std::vector<std::string> surfaces;
    for (const auto& item : line) surfaces.push_back(item.surface);
    return surfaces;
  };

  for (int attempt = 0; attempt < 16; ++attempt) {
    const Plot& donor = *donors[rng.below(donors.size())];
    std::vector<int> usable;
    std::vector<int> fitting;
    for (int j = 0; j < static_cast<int>(donor.lines.size()); ++j) {
      if (donor.lines[j].empty()) continue;
      usable.push_back(j);
      if (preferred_max_len > 0 &&
          donor.lines[j].size() <= static_cast<std::size_t>(preferred_max_len))
        fitting.push_back(j);
    }
    std::vector<int>* choices = &usable;
    if (preferred_max_len > 0) {
      if (fitting.empty()) {
        // fall back to the donor's shortest lines
        std::size_t shortest = donor.lines[usable[0]].size();
        for (int j : usable) shortest = std::min(shortest, donor.lines[j].size());
        fitting.clear();
        for (int j : usable) {
          if (donor.lines[j].size() == shortest) fitting.push_back(j);
        }
      }
      choices = &fitting;
    }
    const int donor_line = (*choices)[rng.below(choices->size())];
    const int target_line = static_cast<int>(rng.below(lines.size()));
    auto replacement = surfaces_of(donor.lines[donor_line]);
    if (replacement == surfaces_of(lines[target_line])) continue;

    OpResult result{lines, {}};
    result.record.technique = Technique::kRandSub;
    result.record.detail = "rand_sub donor=" + donor.story_id +
                           " donor_line=" + std::to_string(donor_line) +
                           " line=" + std::to_string(target_line);
    result.lines[target_line].clear();
    for (std::size_t i = 0; i < replacement.size(); ++i) {
      result.lines[target_line].push_back(
          PlotItem{replacement[i], PlotItemKind::kInserted, target_line});
      result.record.positions.emplace_back(target_line, static_cast<int>(i));
      result.record.inserted.push_back(replacement[i]);
    }
    return result;
  }
  return std::nullopt;
}

ManipulatedPlot assemble(const Plot& plot, OpResult op, std::uint64_t seed) {
  ManipulatedPlot out;
  out.base = plot;
  out.lines = std::move(op.lines);
  out.records.push_back(std::move(op.record));
  out.seed = seed;
  return out;
}

}  // namespace

std::vector<PlotLine> replay_records(const Plot& base,
                                     std::span<const ManipulationRecord> records) {
  std::vector<PlotLine> lines = base.lines;
  for (const auto& record : records) {
    if (record.positions.size() != record.inserted.size())
      throw Error("record positions/inserted size mismatch");
    if (record.technique == Technique::kRandSub) {
      if (record.positions.empty()) throw Error("rand_sub record has no positions");
      const int line = record.positions.front().first;
      if (line < 0 || line >= static_cast<int>(lines.size()))
        throw Error("record line out of range");
      lines[line].clear();
      for (std::size_t i = 0; i < record.inserted.size(); ++i)
        lines[line].push_back(PlotItem{record.inserted[i], PlotItemKind::kInserted, line});
    } else {
      for (std::size_t i = 0; i < record.positions.size(); ++i) {
        const auto [line, index] = record.positions[i];
        if (line < 0 || line >= static_cast<int>(lines.size()) || index < 0 ||
            index > static_cast<int>(lines[line].size()))
          throw Error("record position out of range");
        lines[line].insert(lines[line].begin() + index,
                           PlotItem{record.inserted[i], PlotItemKind::kInserted, line});
      }
    }
  }
  return lines;
}

std::optional<ManipulatedPlot> manip_reorder(const Plot& plot, const TripleStore& store, Rng& rng,
                                             double p_conn) {
  auto op = apply_reorder(plot.lines, store, rng, p_conn);
  if (!op) return std::nullopt;
  return assemble(plot, std::move(*op), rng.initial_seed());
}

std::optional<ManipulatedPlot> manip_contradict(const Plot& plot, const TripleStore& store,
                                                Rng& rng) {
  auto op = apply_contradict(plot.lines, store, rng);
  if (!op) return std::nullopt;
  return assemble(plot, std::move(*op), rng.initial_seed());
}

std::optional<ManipulatedPlot> manip_repeat(const Plot& plot, Rng& rng, int copies) {
  auto op = apply_repeat(plot.lines, rng, copies);
  if (!op) return std::nullopt;
  return assemble(plot, std::move(*op), rng.initial_seed());
}

std::optional<ManipulatedPlot> manip_rand_sub(const Plot& plot, std::span<const Plot> pool,
                                              Rng& rng) {
  auto op = apply_rand_sub(plot.lines, pool, plot.story_id, rng, /*preferred_max_len=*/0);
  if (!op) return std::nullopt;
  return assemble(plot, std::move(*op), rng.initial_seed());
}

ManipulatedPlot compose_manipulations(const Plot& plot, const TripleStore& store,
                                      std::span<const Plot> pool, Rng& rng,
                                      const ComposeConfig& cfg) {
  const std::size_t total_items = plot.item_count();
  if (total_items < 2) throw CompositionInfeasible("plot has fewer than 2 items");

  const int target = 2 + static_cast<int>(rng.below(3));
  std::vector<Technique> order{Technique::kReorder, Technique::kContradict, Technique::kRepeat,
                               Technique::kRandSub};
  rng.shuffle(order);

  const long budget = std::max<long>(fraction_count(cfg.item_fraction, total_items), target);

  ManipulatedPlot out;
  out.base = plot;
  out.lines = plot.lines;
  out.seed = rng.initial_seed();
  long touched = 0;

  for (const Technique technique : order) {
    if (static_cast<int>(out.records.size()) >= target) break;
    const long pending = target - static_cast<long>(out.records.size()) - 1;
    const long alloc = std::max<long>(1, budget - touched - pending);
    std::optional<OpResult> op;
    switch (technique) {
      case Technique::kReorder:
        op = apply_reorder(out.lines, store, rng, cfg.p_conn);
        break;
      case Technique::kContradict:
        op = apply_contradict(out.lines, store, rng);
        break;
      case Technique::kRepeat:
        op = apply_repeat(out.lines, rng, static_cast<int>(alloc));
        break;
      case Technique::kRandSub:
        op = apply_rand_sub(out.lines, pool, plot.story_id, rng, static_cast<int>(alloc));
        break;
    }
    if (!op) continue;  // retry with the next technique in the shuffled order
    touched += static_cast<long>(op->record.positions.size());
    out.lines = std::move(op->lines);
    out.records.push_back(std::move(op->record));
  }

  if (out.records.size() < 2)
    throw CompositionInfeasible("fewer than 2 manipulation techniques applicable");
  return out;
}

}  // namespace implausify
