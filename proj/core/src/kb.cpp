#include "implausify/kb.hpp"

#include <algorithm>
#include <fstream>

#include "implausify/errors.hpp"
#include "implausify/text.hpp"

namespace implausify {

bool is_contradiction(Relation relation) {
  switch (relation) {
    case Relation::kAntonym:
    case Relation::kNotDesires:
    case Relation::kNotCapableOf:
    case Relation::kNotHasProperty:
      return true;
    default:
      return false;
  }
}

bool is_ordering(Relation relation) { return !is_contradiction(relation); }

const char* to_string(Relation relation) {
  switch (relation) {
    case Relation::kAntonym: return "Antonym";
    case Relation::kNotDesires: return "NotDesires";
    case Relation::kNotCapableOf: return "NotCapableOf";
    case Relation::kNotHasProperty: return "NotHasProperty";
    case Relation::kHasPrerequisite: return "HasPrerequisite";
    case Relation::kHasFirstSubevent: return "HasFirstSubevent";
    case Relation::kCauses: return "Causes";
    case Relation::kHasLastSubevent: return "HasLastSubevent";
  }
  return "Antonym";
}

bool relation_from_string(std::string_view name, Relation& out) {
  for (Relation r : {Relation::kAntonym, Relation::kNotDesires, Relation::kNotCapableOf,
                     Relation::kNotHasProperty, Relation::kHasPrerequisite,
                     Relation::kHasFirstSubevent, Relation::kCauses, Relation::kHasLastSubevent}) {
    if (name == to_string(r)) {
      out = r;
      return true;
    }
  }
  return false;
}

TripleStore TripleStore::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());
  TripleStore store;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    const auto tab1 = line.find('\t');
    const auto tab2 = tab1 == std::string::npos ? std::string::npos : line.find('\t', tab1 + 1);
    if (tab2 == std::string::npos)
      throw ParseError("line " + std::to_string(lineno) + ": expected subject<TAB>relation<TAB>object");
    const std::string relation_name = line.substr(tab1 + 1, tab2 - tab1 - 1);
    Relation relation;
    if (!relation_from_string(relation_name, relation))
      throw ParseError("line " + std::to_string(lineno) + ": unknown relation " + relation_name);
    Triple triple{normalize_phrase(line.substr(0, tab1)), relation,
                  normalize_phrase(line.substr(tab2 + 1))};
    if (!triple.subject.empty() && !triple.object.empty())
      store.triples_.push_back(std::move(triple));
  }
  std::sort(store.triples_.begin(), store.triples_.end());
  store.triples_.erase(std::unique(store.triples_.begin(), store.triples_.end()),
                       store.triples_.end());
  store.reindex();
  return store;
}

void TripleStore::insert(std::string_view subject, Relation relation, std::string_view object) {
  Triple triple{normalize_phrase(subject), relation, normalize_phrase(object)};
  if (triple.subject.empty() || triple.object.empty()) return;
  auto it = std::lower_bound(triples_.begin(), triples_.end(), triple);
  if (it != triples_.end() && *it == triple) return;
  triples_.insert(it, std::move(triple));
  reindex();
}

void TripleStore::reindex() {
  by_subject_.clear();
  by_object_.clear();
  for (std::size_t i = 0; i < triples_.size(); ++i) {
    by_subject_[triples_[i].subject].push_back(i);
    by_object_[triples_[i].object].push_back(i);
  }
}

std::vector<std::string> TripleStore::contradictions(std::string_view term) const {
  const std::string key = normalize_phrase(term);
  std::vector<std::string> out;
  if (auto it = by_subject_.find(key); it != by_subject_.end()) {
    for (std::size_t i : it->second) {
      if (is_contradiction(triples_[i].relation)) out.push_back(triples_[i].object);
    }
  }
  if (auto it = by_object_.find(key); it != by_object_.end()) {
    for (std::size_t i : it->second) {
      if (is_contradiction(triples_[i].relation)) out.push_back(triples_[i].subject);
    }
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

std::optional<OrderedPair> TripleStore::ordered_pair(std::string_view verb, Rng& rng) const {
  const std::string key = normalize_phrase(verb);
  auto it = by_subject_.find(key);
  if (it == by_subject_.end()) return std::nullopt;
  std::vector<std::size_t> ordering;
  for (std::size_t i : it->second) {
    if (is_ordering(triples_[i].relation)) ordering.push_back(i);
  }
  if (ordering.empty()) return std::nullopt;
  const Triple& triple = triples_[ordering[rng.below(ordering.size())]];
  // HasPrerequisite/HasFirstSubevent: the object precedes the subject.
  if (triple.relation == Relation::kHasPrerequisite ||
      triple.relation == Relation::kHasFirstSubevent) {
    return OrderedPair{triple.object, triple.subject, triple.relation};
  }
  return OrderedPair{triple.subject, triple.object, triple.relation};
}

bool TripleStore::has_ordering_fact(std::string_view verb) const {
  const std::string key = normalize_phrase(verb);
  auto it = by_subject_.find(key);
  if (it == by_subject_.end()) return false;
  return std::any_of(it->second.begin(), it->second.end(),
                     [&](std::size_t i) { return is_ordering(triples_[i].relation); });
}

}  // namespace implausify
