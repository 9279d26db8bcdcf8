#pragma once

#include <cctype>
#include <string>
#include <string_view>
#include <vector>

namespace bioverify {

/// Normalization ruleset, version 1. Every verdict and index key downstream
/// depends on this exact behavior; changing any rule invalidates stored
/// reports and golden files.
///
///   - ASCII letters fold to lower case (bytes >= 0x80 pass through unchanged)
///   - '-', '/' and ',' become spaces
///   - '\'' and '.' are dropped
///   - whitespace runs collapse to a single space, ends trimmed
///
/// Idempotent and total over arbitrary byte strings.
inline std::string normalize(std::string_view text) {
  std::string out;
  out.reserve(text.size());
  bool pending_space = false;
  for (const char ch : text) {
    const auto c = static_cast<unsigned char>(ch);
    if (c == '-' || c == '/' || c == ',' || std::isspace(c)) {
      if (!out.empty()) pending_space = true;
      continue;
    }
    if (c == '\'' || c == '.') continue;
    if (pending_space) {
      out.push_back(' ');
      pending_space = false;
    }
    out.push_back(static_cast<char>(std::tolower(c)));
  }
  return out;
}

inline bool is_token_byte(unsigned char c) { return std::isalnum(c) != 0 || c >= 0x80; }

/// Splits normalized text into tokens: maximal runs of letters/digits.
inline std::vector<std::string> tokenize(std::string_view normalized) {
  std::vector<std::string> tokens;
  std::string current;
  for (const char ch : normalized) {
    if (is_token_byte(static_cast<unsigned char>(ch))) {
      current.push_back(ch);
    } else if (!current.empty()) {
      tokens.push_back(std::move(current));
      current.clear();
    }
  }
  if (!current.empty()) tokens.push_back(std::move(current));
  return tokens;
}

/// Whole-token contiguous phrase containment. An empty phrase matches nothing.
inline bool contains_token_phrase(const std::vector<std::string>& tokens,
                                  const std::vector<std::string>& phrase) {
  if (phrase.empty() || tokens.size() < phrase.size()) return false;
  for (std::size_t i = 0; i + phrase.size() <= tokens.size(); ++i) {
    std::size_t j = 0;
    while (j < phrase.size() && tokens[i + j] == phrase[j]) ++j;
    if (j == phrase.size()) return true;
  }
  return false;
}

}  // namespace bioverify
