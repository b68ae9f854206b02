#pragma once

#include <optional>
#include <span>

#include "implausify/kb.hpp"
#include "implausify/manipulation_record.hpp"
#include "implausify/plots.hpp"
#include "implausify/rng.hpp"

namespace implausify {

/// A plot with implausibility sources injected. `lines` always differ from
/// `base.lines`, and replay_records(base, records) reproduces `lines`.
struct ManipulatedPlot {
  Plot base;
  std::vector<PlotLine> lines;
  std::vector<ManipulationRecord> records;
  std::uint64_t seed = 0;
};

/// Applies records in order to the base plot. Insertion records place each
/// inserted surface at its recorded (line, index); rand_sub records replace
/// the whole target line. Throws Error on out-of-range positions.
std::vector<PlotLine> replay_records(const Plot& base, std::span<const ManipulationRecord> records);

inline constexpr const char* kConnectives[] = {"then", "later", "subsequently"};

/// Picks a random verb item with an ordering fact and inserts the fact's
/// concept pair at the verb's position in flipped (wrong) order, optionally
/// joined by a connective. nullopt when no verb qualifies.
std::optional<ManipulatedPlot> manip_reorder(const Plot& plot, const TripleStore& store, Rng& rng,
                                             double p_conn = 0.5);

/// Inserts one contradiction counterpart immediately before a random
/// qualifying item. nullopt when no item has a contradiction fact.
std::optional<ManipulatedPlot> manip_contradict(const Plot& plot, const TripleStore& store,
                                                Rng& rng);

/// Duplicates one random item into `copies` uniformly random positions
/// across all plot lines. nullopt for an empty plot.
std::optional<ManipulatedPlot> manip_repeat(const Plot& plot, Rng& rng, int copies = 2);

/// Replaces one line wholesale with a line drawn from another story's plot.
/// nullopt when the pool holds no usable donor.
std::optional<ManipulatedPlot> manip_rand_sub(const Plot& plot, std::span<const Plot> pool,
                                              Rng& rng);

struct ComposeConfig {
  double item_fraction = 0.15;  // share of plot items to touch
  double p_conn = 0.5;          // connective probability in reorder
  int copies = 2;               // copy count for standalone repeat
};

/// Draws 2-4 distinct techniques uniformly and applies them in random
/// order, swapping in an unchosen technique when one has no target. The
/// total touched items track round(item_fraction * |items|) with at least
/// one per applied technique. Throws CompositionInfeasible when fewer than
/// two techniques apply.
ManipulatedPlot compose_manipulations(const Plot& plot, const TripleStore& store,
                                      std::span<const Plot> pool, Rng& rng,
                                      const ComposeConfig& cfg = {});

}  // namespace implausify
