#pragma once

#include <string>
#include <utility>
#include <vector>

namespace implausify {

/// The four manipulation families. Text-level heuristic edits are recorded
/// under their closest family (sentence substitution as kRandSub, keyword or
/// negation edits as kContradict, n-gram repeats as kRepeat, sentence swaps
/// as kReorder) with the concrete rule named in ManipulationRecord::detail.
enum class Technique { kReorder, kContradict, kRepeat, kRandSub };

const char* to_string(Technique technique);
bool technique_from_string(std::string_view name, Technique& out);

/// One applied edit. `positions` are (line, index) coordinates of the
/// touched items, valid in the plot state immediately after this record is
/// applied; a sequence of records therefore replays deterministically in
/// order (see plot_manip replay_records).
struct ManipulationRecord {
  Technique technique = Technique::kReorder;
  std::vector<std::pair<int, int>> positions;
  std::vector<std::string> inserted;
  std::string detail;

  bool operator==(const ManipulationRecord&) const = default;
};

}  // namespace implausify
