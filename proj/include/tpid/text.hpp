#pragma once

#include <cctype>
#include <string>
#include <string_view>
#include <vector>

namespace tpid::text {

inline bool is_space(char c) { return std::isspace(static_cast<unsigned char>(c)) != 0; }

inline std::string_view trim(std::string_view s) {
  std::size_t b = 0, e = s.size();
  while (b < e && is_space(s[b])) ++b;
  while (e > b && is_space(s[e - 1])) --e;
  return s.substr(b, e - b);
}

inline std::string to_upper(std::string_view s) {
  std::string out(s);
  for (auto& c : out) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
  return out;
}

inline std::string to_lower(std::string_view s) {
  std::string out(s);
  for (auto& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

inline std::vector<std::string> split_whitespace(std::string_view s) {
  std::vector<std::string> out;
  std::size_t i = 0;
  while (i < s.size()) {
    while (i < s.size() && is_space(s[i])) ++i;
    std::size_t j = i;
    while (j < s.size() && !is_space(s[j])) ++j;
    if (j > i) out.emplace_back(s.substr(i, j - i));
    i = j;
  }
  return out;
}

// Sentences end at '.', '?' or '!' followed by whitespace (or end of text).
// Pieces are trimmed; empty pieces are dropped.
inline std::vector<std::string> split_sentences(std::string_view s) {
  std::vector<std::string> out;
  std::size_t start = 0;
  auto flush = [&](std::size_t end) {
    auto piece = trim(s.substr(start, end - start));
    if (!piece.empty()) out.emplace_back(piece);
  };
  for (std::size_t i = 0; i < s.size(); ++i) {
    const char c = s[i];
    if ((c == '.' || c == '?' || c == '!') && (i + 1 == s.size() || is_space(s[i + 1]))) {
      flush(i + 1);
      start = i + 1;
    }
  }
  flush(s.size());
  return out;
}

// Lowercased alphanumeric runs; anything else separates tokens.
inline std::vector<std::string> word_tokens(std::string_view s) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : s) {
    if (std::isalnum(static_cast<unsigned char>(c))) {
      cur.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
    } else if (!cur.empty()) {
      out.push_back(std::move(cur));
      cur.clear();
    }
  }
  if (!cur.empty()) out.push_back(std::move(cur));
  return out;
}

// Tokens for the retrieval baseline: word_tokens minus anything shorter than two characters.
inline std::vector<std::string> tfidf_tokens(std::string_view s) {
  auto toks = word_tokens(s);
  std::erase_if(toks, [](const std::string& t) { return t.size() < 2; });
  return toks;
}

// Tokens for word/entity vector lookup. Whitespace split, lowercased, with
// surrounding punctuation stripped; inner characters such as '_' survive so
// pre-normalized entity mentions like "juno_macguff" stay intact.
inline std::vector<std::string> entity_tokens(std::string_view s) {
  std::vector<std::string> out;
  for (auto& raw : split_whitespace(s)) {
    std::size_t b = 0, e = raw.size();
    auto punct = [](char c) { return std::ispunct(static_cast<unsigned char>(c)) != 0 && c != '_'; };
    while (b < e && punct(raw[b])) ++b;
    while (e > b && punct(raw[e - 1])) --e;
    if (e > b) out.push_back(to_lower(std::string_view(raw).substr(b, e - b)));
  }
  return out;
}

}  // namespace tpid::text
