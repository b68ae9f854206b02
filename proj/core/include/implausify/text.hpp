#pragma once

#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <unordered_set>
#include <vector>

namespace implausify {

using Token = std::string;
using TokenList = std::vector<std::string>;

/// Lowercases and splits on whitespace; punctuation becomes its own token.
/// Idempotent on joined output: tokenize(join(tokenize(s))) == tokenize(s).
TokenList tokenize(std::string_view text);

/// Splits into sentences on runs of [.!?] followed by whitespace or end of
/// input; the terminators are dropped. Each sentence is tokenized. Empty
/// sentences are omitted. Abbreviations are not special-cased.
std::vector<TokenList> segment_sentences(std::string_view text);

std::string join_tokens(std::span<const Token> tokens);

/// Plain whitespace split, no lowercasing. Inverse of join_tokens for any
/// list of non-empty whitespace-free tokens.
TokenList split_whitespace(std::string_view text);

/// True when every byte of the token is ASCII punctuation.
bool is_punctuation(std::string_view token);

/// Lowercase and collapse internal whitespace runs to single spaces.
std::string normalize_phrase(std::string_view phrase);

/// One token per line, UTF-8; blank lines and '#' comments skipped.
std::unordered_set<std::string> load_wordlist(const std::filesystem::path& path);

/// Small built-in English function-word list, used when no stopword file is
/// supplied.
const std::unordered_set<std::string>& default_stopwords();

/// Auxiliaries and copulas recognized by negation insertion.
const std::unordered_set<std::string>& negation_auxiliaries();

}  // namespace implausify
