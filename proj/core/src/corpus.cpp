#include "implausify/corpus.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>

#include <json.hpp>

#include "implausify/errors.hpp"
#include "implausify/rng.hpp"

namespace implausify {

using nlohmann::json;

const char* to_string(Label label) {
  return label == Label::kPlausible ? "plausible" : "implausible";
}

const char* to_string(Provenance provenance) {
  switch (provenance) {
    case Provenance::kHuman: return "human";
    case Provenance::kHeurSentSub: return "heur_sent_sub";
    case Provenance::kHeurKeySub: return "heur_key_sub";
    case Provenance::kUnion: return "union";
    case Provenance::kManPlts: return "manplts";
    case Provenance::kAfManPlts: return "af_manplts";
  }
  return "human";
}

bool label_from_string(std::string_view name, Label& out) {
  if (name == "plausible") out = Label::kPlausible;
  else if (name == "implausible") out = Label::kImplausible;
  else return false;
  return true;
}

bool provenance_from_string(std::string_view name, Provenance& out) {
  for (Provenance p : {Provenance::kHuman, Provenance::kHeurSentSub, Provenance::kHeurKeySub,
                       Provenance::kUnion, Provenance::kManPlts, Provenance::kAfManPlts}) {
    if (name == to_string(p)) {
      out = p;
      return true;
    }
  }
  return false;
}

const char* to_string(Technique technique) {
  switch (technique) {
    case Technique::kReorder: return "reorder";
    case Technique::kContradict: return "contradict";
    case Technique::kRepeat: return "repeat";
    case Technique::kRandSub: return "rand_sub";
  }
  return "reorder";
}

bool technique_from_string(std::string_view name, Technique& out) {
  for (Technique t : {Technique::kReorder, Technique::kContradict, Technique::kRepeat,
                      Technique::kRandSub}) {
    if (name == to_string(t)) {
      out = t;
      return true;
    }
  }
  return false;
}

long fraction_count(double fraction, std::size_t n) {
  return std::llround(fraction * static_cast<double>(n));
}

namespace {

Story make_story(std::string id, std::string text) {
  Story story;
  story.id = std::move(id);
  story.sentences = segment_sentences(text);
  story.raw = std::move(text);
  return story;
}

json record_to_json(const ManipulationRecord& record) {
  json positions = json::array();
  for (const auto& [line, index] : record.positions) positions.push_back({line, index});
  return json{{"technique", to_string(record.technique)},
              {"positions", std::move(positions)},
              {"inserted", record.inserted},
              {"detail", record.detail}};
}

ManipulationRecord record_from_json(const json& row, const std::string& where) {
  ManipulationRecord record;
  if (!technique_from_string(row.value("technique", ""), record.technique))
    throw ParseError(where + ": unknown technique");
  for (const auto& pos : row.at("positions"))
    record.positions.emplace_back(pos.at(0).get<int>(), pos.at(1).get<int>());
  record.inserted = row.at("inserted").get<std::vector<std::string>>();
  record.detail = row.value("detail", "");
  return record;
}

void write_examples(std::span<const LabeledExample> examples, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path.string());
  for (const auto& example : examples) {
    json manipulations = json::array();
    for (const auto& record : example.manipulations) manipulations.push_back(record_to_json(record));
    json row{{"text", join_tokens(example.text)},
             {"label", to_string(example.label)},
             {"provenance", to_string(example.provenance)},
             {"source_id", example.source_id},
             {"manipulations", std::move(manipulations)}};
    out << row.dump() << '\n';
  }
  if (!out) throw IoError("write failed: " + path.string());
}

std::vector<LabeledExample> read_examples(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());
  std::vector<LabeledExample> examples;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    const std::string where = path.filename().string() + " line " + std::to_string(lineno);
    json row = json::parse(line, nullptr, false);
    if (row.is_discarded()) throw ParseError(where + ": invalid json");
    LabeledExample example;
    example.text = split_whitespace(row.at("text").get<std::string>());
    if (!label_from_string(row.value("label", ""), example.label))
      throw ParseError(where + ": unknown label");
    if (!provenance_from_string(row.value("provenance", ""), example.provenance))
      throw ParseError(where + ": unknown provenance");
    example.source_id = row.at("source_id").get<std::string>();
    for (const auto& record : row.at("manipulations"))
      example.manipulations.push_back(record_from_json(record, where));
    examples.push_back(std::move(example));
  }
  return examples;
}

std::string example_identity(const LabeledExample& example) {
  std::string key = example.source_id;
  key.push_back('\x1f');
  key += to_string(example.label);
  key.push_back('\x1f');
  key += to_string(example.provenance);
  key.push_back('\x1f');
  key += join_tokens(example.text);
  return key;
}

}  // namespace

StoryLoadResult load_stories(const std::filesystem::path& path, StoryFormat format) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());
  StoryLoadResult result;
  std::set<std::string> seen_ids;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    Story story;
    if (format == StoryFormat::kJsonl) {
      json row = json::parse(line, nullptr, false);
      if (row.is_discarded())
        throw ParseError("line " + std::to_string(lineno) + ": invalid json");
      if (!row.contains("id"))
        throw ParseError("line " + std::to_string(lineno) + ": missing field id");
      if (!row.contains("text"))
        throw ParseError("line " + std::to_string(lineno) + ": missing field text");
      story = make_story(row["id"].is_string() ? row["id"].get<std::string>() : row["id"].dump(),
                         row["text"].get<std::string>());
    } else {
      story = make_story(std::to_string(lineno), line);
    }
    if (story.sentences.empty()) {
      ++result.skipped_empty;
      continue;
    }
    if (!seen_ids.insert(story.id).second)
      throw ParseError("line " + std::to_string(lineno) + ": duplicate story id " + story.id);
    result.stories.push_back(std::move(story));
  }
  return result;
}

std::pair<std::vector<Story>, std::vector<Story>> split_corpus(std::span<const Story> stories,
                                                               double lm_fraction,
                                                               std::uint64_t seed) {
  if (lm_fraction <= 0.0 || lm_fraction >= 1.0)
    throw Error("lm_fraction must be in (0, 1)");
  std::vector<std::size_t> order(stories.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  Rng rng(mix_seed(seed, stable_hash64("split_corpus")));
  rng.shuffle(order);
  const std::size_t lm_size =
      static_cast<std::size_t>(fraction_count(lm_fraction, stories.size()));
  std::pair<std::vector<Story>, std::vector<Story>> parts;
  for (std::size_t i = 0; i < order.size(); ++i) {
    (i < lm_size ? parts.first : parts.second).push_back(stories[order[i]]);
  }
  return parts;
}

void write_dataset(const DatasetSplit& split, const std::filesystem::path& dir) {
  std::set<std::string> identities;
  for (const auto* part : {&split.train, &split.valid, &split.test}) {
    for (const auto& example : *part) {
      if (!identities.insert(example_identity(example)).second)
        throw Error("duplicate example: source_id " + example.source_id);
    }
  }
  std::filesystem::create_directories(dir);
  write_examples(split.train, dir / "train.jsonl");
  write_examples(split.valid, dir / "valid.jsonl");
  write_examples(split.test, dir / "test.jsonl");
  std::ofstream meta(dir / "meta.json");
  if (!meta) throw IoError("cannot write " + (dir / "meta.json").string());
  meta << json{{"seed", split.seed}}.dump() << '\n';
}

DatasetSplit read_dataset(const std::filesystem::path& dir) {
  DatasetSplit split;
  split.train = read_examples(dir / "train.jsonl");
  split.valid = read_examples(dir / "valid.jsonl");
  split.test = read_examples(dir / "test.jsonl");
  std::ifstream meta(dir / "meta.json");
  if (meta) {
    json row = json::parse(meta, nullptr, false);
    if (!row.is_discarded()) split.seed = row.value("seed", std::uint64_t{0});
  }
  return split;
}

TokenList flatten_story(std::span<const TokenList> sentences) {
  TokenList text;
  for (const auto& sentence : sentences) {
    text.insert(text.end(), sentence.begin(), sentence.end());
    text.push_back(".");
  }
  return text;
}

LabeledExample make_positive(const Story& story) {
  LabeledExample example;
  example.text = flatten_story(story.sentences);
  example.label = Label::kPlausible;
  example.provenance = Provenance::kHuman;
  example.source_id = story.id;
  return example;
}

}  // namespace implausify
