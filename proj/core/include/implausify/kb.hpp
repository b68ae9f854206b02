#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "implausify/rng.hpp"

namespace implausify {

/// Commonsense relation types. The first four link a concept to a
/// conflicting one; the last four imply a temporal/causal order between
/// subject and object.
enum class Relation {
  kAntonym,
  kNotDesires,
  kNotCapableOf,
  kNotHasProperty,
  kHasPrerequisite,
  kHasFirstSubevent,
  kCauses,
  kHasLastSubevent,
};

bool is_contradiction(Relation relation);
bool is_ordering(Relation relation);
const char* to_string(Relation relation);
bool relation_from_string(std::string_view name, Relation& out);

struct Triple {
  std::string subject;
  Relation relation = Relation::kAntonym;
  std::string object;

  auto operator<=>(const Triple&) const = default;
};

/// The two concepts of an ordering fact in their correct temporal order.
struct OrderedPair {
  std::string first;
  std::string second;
  Relation relation = Relation::kCauses;

  bool operator==(const OrderedPair&) const = default;
};

/// Deduplicated, phrase-normalized triple set with subject and object
/// indexes. Immutable after load; safe for concurrent reads.
class TripleStore {
 public:
  TripleStore() = default;

  /// Rows are `subject<TAB>relation<TAB>object`; '#' comment lines ignored.
  static TripleStore load(const std::filesystem::path& path);

  void insert(std::string_view subject, Relation relation, std::string_view object);

  /// All counterpart phrases of contradiction-type facts where `term`
  /// appears as subject or object. Sorted, deduplicated.
  std::vector<std::string> contradictions(std::string_view term) const;

  /// Uniformly samples an ordering fact with `verb` as subject and returns
  /// its concepts in correct order: (object, subject) for HasPrerequisite
  /// and HasFirstSubevent, (subject, object) for Causes and HasLastSubevent.
  std::optional<OrderedPair> ordered_pair(std::string_view verb, Rng& rng) const;

  bool has_ordering_fact(std::string_view verb) const;

  std::size_t size() const { return triples_.size(); }
  const std::vector<Triple>& triples() const { return triples_; }

  bool operator==(const TripleStore& other) const { return triples_ == other.triples_; }

 private:
  void reindex();

  std::vector<Triple> triples_;  // kept sorted and unique
  std::unordered_map<std::string, std::vector<std::size_t>> by_subject_;
  std::unordered_map<std::string, std::vector<std::size_t>> by_object_;
};

}  // namespace implausify
