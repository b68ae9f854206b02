#include <doctest.h>

#include "implausify/errors.hpp"
#include "implausify/kb.hpp"
#include "support/fixtures.hpp"
#include "support/temp_dir.hpp"

using namespace implausify;
using testsupport::TempDir;
using testsupport::write_file;

TEST_CASE("load_triples parses tsv with comments and dedupes") {
  TempDir dir;
  write_file(dir.file("kb.tsv"),
             "# comment line\n"
             "work\tCauses\tget pay\n"
             "wallet\tAntonym\tpurse\n"
             "work\tCauses\tget pay\n");
  const auto store = TripleStore::load(dir.file("kb.tsv"));
  CHECK(store.size() == 2);

  Rng rng(1);
  const auto pair = store.ordered_pair("work", rng);
  REQUIRE(pair.has_value());
  CHECK(pair->first == "work");
  CHECK(pair->second == "get pay");
  CHECK(pair->relation == Relation::kCauses);

  // contradiction fact reachable from both sides via the object index
  CHECK(store.contradictions("wallet") == std::vector<std::string>{"purse"});
  CHECK(store.contradictions("purse") == std::vector<std::string>{"wallet"});
}

TEST_CASE("load_triples names the line of an unknown relation") {
  TempDir dir;
  write_file(dir.file("kb.tsv"), "a\tFriendOf\tb\n");
  CHECK_THROWS_WITH_AS(TripleStore::load(dir.file("kb.tsv")), "line 1: unknown relation FriendOf",
                       ParseError);
}

TEST_CASE("loading the same file twice yields equal stores") {
  TempDir dir;
  write_file(dir.file("kb.tsv"), "work\tCauses\tget pay\npacked\tAntonym\tunpacked\n");
  CHECK(TripleStore::load(dir.file("kb.tsv")) == TripleStore::load(dir.file("kb.tsv")));
}

TEST_CASE("contradictions") {
  const auto store = testsupport::basic_store();
  CHECK(store.contradictions("packed") == std::vector<std::string>{"unpacked"});
  CHECK(store.contradictions("no such term").empty());

  // two facts for one term come back sorted
  TripleStore two;
  two.insert("hot", Relation::kAntonym, "cold");
  two.insert("hot", Relation::kAntonym, "chilly");
  two.insert("warm", Relation::kCauses, "sweat");  // ordering fact, excluded
  CHECK(two.contradictions("hot") == std::vector<std::string>{"chilly", "cold"});
}

TEST_CASE("antonym symmetry holds for every stored antonym fact") {
  const auto store = testsupport::basic_store();
  for (const auto& triple : store.triples()) {
    if (triple.relation != Relation::kAntonym) continue;
    const auto forward = store.contradictions(triple.subject);
    const auto backward = store.contradictions(triple.object);
    CHECK(std::find(forward.begin(), forward.end(), triple.object) != forward.end());
    CHECK(std::find(backward.begin(), backward.end(), triple.subject) != backward.end());
  }
}

TEST_CASE("ordered_pair follows the relation order rule") {
  const auto store = testsupport::basic_store();
  Rng rng(5);

  // Causes: subject comes first
  auto pair = store.ordered_pair("work", rng);
  REQUIRE(pair.has_value());
  CHECK(*pair == OrderedPair{"work", "get pay", Relation::kCauses});

  // HasPrerequisite: object comes first
  pair = store.ordered_pair("bake", rng);
  REQUIRE(pair.has_value());
  CHECK(*pair == OrderedPair{"buy flour", "bake", Relation::kHasPrerequisite});

  // HasFirstSubevent: object first; HasLastSubevent: subject first
  pair = store.ordered_pair("walk", rng);
  REQUIRE(pair.has_value());
  CHECK(*pair == OrderedPair{"stand up", "walk", Relation::kHasFirstSubevent});
  pair = store.ordered_pair("clean", rng);
  REQUIRE(pair.has_value());
  CHECK(*pair == OrderedPair{"clean", "rest", Relation::kHasLastSubevent});

  CHECK_FALSE(store.ordered_pair("packed", rng).has_value());  // antonym only
  CHECK_FALSE(store.ordered_pair("unknown", rng).has_value());
}

TEST_CASE("ordered_pair returns ordering relations containing the query verb") {
  Rng gen(123);
  const std::vector<Relation> ordering = {Relation::kHasPrerequisite, Relation::kHasFirstSubevent,
                                          Relation::kCauses, Relation::kHasLastSubevent};
  for (int trial = 0; trial < 300; ++trial) {
    TripleStore store;
    const std::string verb = "verb" + std::to_string(gen.below(50));
    const std::size_t facts = 1 + gen.below(4);
    for (std::size_t f = 0; f < facts; ++f) {
      store.insert(verb, ordering[gen.below(ordering.size())],
                   "concept" + std::to_string(gen.next_u64() % 100));
    }
    store.insert(verb, Relation::kAntonym, "never returned");
    Rng rng(gen.next_u64());
    const auto pair = store.ordered_pair(verb, rng);
    REQUIRE(pair.has_value());
    CHECK(is_ordering(pair->relation));
    const bool contains_verb = pair->first == verb || pair->second == verb;
    CHECK(contains_verb);
  }
}

TEST_CASE("relation classification is a disjoint partition") {
  for (Relation r : {Relation::kAntonym, Relation::kNotDesires, Relation::kNotCapableOf,
                     Relation::kNotHasProperty, Relation::kHasPrerequisite,
                     Relation::kHasFirstSubevent, Relation::kCauses, Relation::kHasLastSubevent}) {
    CHECK(is_contradiction(r) != is_ordering(r));
    Relation parsed;
    REQUIRE(relation_from_string(to_string(r), parsed));
    CHECK(parsed == r);
  }
}
