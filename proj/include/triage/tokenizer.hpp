#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "triage/text.hpp"

namespace triage::features {

/// Turkish-lowercased maximal runs of letters and digits.
inline std::vector<std::string> tokenize(std::string_view input) {
  std::vector<std::string> tokens;
  std::string current;
  for (char32_t c : text::decode(input)) {
    if (text::is_letter(c) || text::is_digit(c)) {
      text::append_utf8(current, text::to_lower(c));
    } else if (!current.empty()) {
      tokens.push_back(std::move(current));
      current.clear();
    }
  }
  if (!current.empty()) tokens.push_back(std::move(current));
  return tokens;
}

/// Raw sentence spans, split at . ? ! and newline. Empty spans are kept so
/// callers decide what counts as a sentence.
inline std::vector<std::string> split_sentences(std::string_view input) {
  std::vector<std::string> out;
  std::string current;
  for (char c : input) {
    if (c == '.' || c == '?' || c == '!' || c == '\n') {
      out.push_back(std::move(current));
      current.clear();
    } else {
      current.push_back(c);
    }
  }
  out.push_back(std::move(current));
  return out;
}

/// Token lists of the sentences that contain at least one token.
inline std::vector<std::vector<std::string>> tokenized_sentences(std::string_view input) {
  std::vector<std::vector<std::string>> out;
  for (const auto& s : split_sentences(input)) {
    auto toks = tokenize(s);
    if (!toks.empty()) out.push_back(std::move(toks));
  }
  return out;
}

}  // namespace triage::features
