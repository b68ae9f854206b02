#include "implausify/text.hpp"

#include <cctype>
#include <fstream>

#include "implausify/errors.hpp"

namespace implausify {

namespace {

bool is_word_byte(unsigned char c) {
  // Bytes >= 0x80 are UTF-8 continuation/lead bytes; treat them as letters.
  return std::isalnum(c) != 0 || c >= 0x80;
}

bool is_space_byte(unsigned char c) { return std::isspace(c) != 0; }

bool is_terminator(char c) { return c == '.' || c == '!' || c == '?'; }

char lower_ascii(unsigned char c) { return static_cast<char>(std::tolower(c)); }

}  // namespace

TokenList tokenize(std::string_view text) {
  TokenList tokens;
  std::string current;
  for (unsigned char c : text) {
    if (is_word_byte(c)) {
      current.push_back(lower_ascii(c));
    } else {
      if (!current.empty()) {
        tokens.push_back(std::move(current));
        current.clear();
      }
      if (!is_space_byte(c)) tokens.emplace_back(1, static_cast<char>(c));
    }
  }
  if (!current.empty()) tokens.push_back(std::move(current));
  return tokens;
}

std::vector<TokenList> segment_sentences(std::string_view text) {
  std::vector<TokenList> sentences;
  std::string current;
  for (std::size_t i = 0; i < text.size(); ++i) {
    if (is_terminator(text[i])) {
      std::size_t j = i;
      while (j + 1 < text.size() && is_terminator(text[j + 1])) ++j;
      bool at_boundary = j + 1 == text.size() || is_space_byte(static_cast<unsigned char>(text[j + 1]));
      if (at_boundary) {
        auto tokens = tokenize(current);
        if (!tokens.empty()) sentences.push_back(std::move(tokens));
        current.clear();
        i = j;
        continue;
      }
    }
    current.push_back(text[i]);
  }
  auto tokens = tokenize(current);
  if (!tokens.empty()) sentences.push_back(std::move(tokens));
  return sentences;
}

std::string join_tokens(std::span<const Token> tokens) {
  std::string out;
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    if (i) out.push_back(' ');
    out += tokens[i];
  }
  return out;
}

TokenList split_whitespace(std::string_view text) {
  TokenList tokens;
  std::string current;
  for (unsigned char c : text) {
    if (is_space_byte(c)) {
      if (!current.empty()) {
        tokens.push_back(std::move(current));
        current.clear();
      }
    } else {
      current.push_back(static_cast<char>(c));
    }
  }
  if (!current.empty()) tokens.push_back(std::move(current));
  return tokens;
}

bool is_punctuation(std::string_view token) {
  if (token.empty()) return false;
  for (unsigned char c : token) {
    if (c >= 0x80 || std::ispunct(c) == 0) return false;
  }
  return true;
}

std::string normalize_phrase(std::string_view phrase) {
  std::string out;
  bool pending_space = false;
  for (unsigned char c : phrase) {
    if (is_space_byte(c)) {
      if (!out.empty()) pending_space = true;
    } else {
      if (pending_space) {
        out.push_back(' ');
        pending_space = false;
      }
      out.push_back(lower_ascii(c));
    }
  }
  return out;
}

std::unordered_set<std::string> load_wordlist(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open wordlist: " + path.string());
  std::unordered_set<std::string> words;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    std::string word = normalize_phrase(line);
    if (word.empty() || word[0] == '#') continue;
    words.insert(std::move(word));
  }
  return words;
}

const std::unordered_set<std::string>& default_stopwords() {
  static const std::unordered_set<std::string> kStopwords = {
      "a",    "an",   "and",  "are",  "as",    "at",   "be",    "but",  "by",
      "for",  "from", "had",  "has",  "have",  "he",   "her",   "his",  "i",
      "in",   "is",   "it",   "its",  "of",    "on",   "or",    "she",  "so",
      "that", "the",  "their", "then", "they", "this", "to",    "was",  "we",
      "were", "will", "with", "you",  "not",   "my",   "me",    "him",  "them",
      "up",   "out",  "do",   "did",  "does",  "your", "our",   "been", "would"};
  return kStopwords;
}

const std::unordered_set<std::string>& negation_auxiliaries() {
  static const std::unordered_set<std::string> kAux = {
      "is",  "was",  "are", "were", "has", "had",
      "can", "will", "would", "did", "does", "do"};
  return kAux;
}

}  // namespace implausify
