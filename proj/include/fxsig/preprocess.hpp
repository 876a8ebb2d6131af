#pragma once

// Text normalization and stop-word filtering for news and social posts.

#include <cctype>
#include <fstream>
#include <istream>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "fxsig/common.hpp"

namespace fxsig {

struct ProcessedDoc {
  std::vector<std::string> tokens;  // each matches [a-z0-9']+
  std::optional<std::size_t> source_index;  // position of the NewsRecord in its corpus
};

class StopWords {
 public:
  StopWords() = default;
  StopWords(std::initializer_list<std::string> words) : words_(words) {}

  bool contains(std::string_view w) const { return words_.find(w) != words_.end(); }
  std::size_t size() const noexcept { return words_.size(); }
  void insert(std::string w) { words_.insert(std::move(w)); }

 private:
  std::set<std::string, std::less<>> words_;
};

namespace detail {

inline bool is_space(char c) noexcept {
  return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v';
}
inline bool is_alnum(char c) noexcept {
  return (c >= 'a' && c <= 'z') || (c >= '0' && c <= '9');
}

}  // namespace detail

/// Lowercases and cleans raw text:
///  - runs starting with '@' or '#' are dropped up to the next whitespace;
///  - URLs (http://, https://, or a leading www.) likewise;
///  - every other character outside [a-z0-9] becomes a space, except an
///    apostrophe between two alphanumerics ("don't");
///  - whitespace runs collapse to one space, ends trimmed.
/// Non-ASCII bytes are dropped; U+2018/U+2019 are read as apostrophes.
inline std::string normalize(std::string_view text) {
  std::string lowered;
  lowered.reserve(text.size());
  for (std::size_t i = 0; i < text.size(); ++i) {
    const char c = text[i];
    if (c == '\xE2' && i + 2 < text.size() && text[i + 1] == '\x80' &&
        (text[i + 2] == '\x98' || text[i + 2] == '\x99')) {
      lowered.push_back('\'');
      i += 2;
      continue;
    }
    lowered.push_back(c >= 'A' && c <= 'Z' ? static_cast<char>(c - 'A' + 'a') : c);
  }

  std::string stripped;
  stripped.reserve(lowered.size());
  const std::string_view s(lowered);
  for (std::size_t i = 0; i < s.size();) {
    const bool at_word_start = i == 0 || !detail::is_alnum(s[i - 1]);
    const bool drop = s[i] == '@' || s[i] == '#' ||
                      (at_word_start && (s.substr(i).starts_with("http://") ||
                                         s.substr(i).starts_with("https://") ||
                                         s.substr(i).starts_with("www.")));
    if (drop) {
      while (i < s.size() && !detail::is_space(s[i])) ++i;
      stripped.push_back(' ');
      continue;
    }
    stripped.push_back(s[i++]);
  }

  std::string out;
  out.reserve(stripped.size());
  bool pending_space = false;
  for (std::size_t i = 0; i < stripped.size(); ++i) {
    char c = stripped[i];
    if (c == '\'') {
      const bool inner = i > 0 && i + 1 < stripped.size() && detail::is_alnum(stripped[i - 1]) &&
                         detail::is_alnum(stripped[i + 1]);
      if (!inner) c = ' ';
    } else if (!detail::is_alnum(c)) {
      c = ' ';
    }
    if (c == ' ') {
      pending_space = !out.empty();
      continue;
    }
    if (pending_space) out.push_back(' ');
    pending_space = false;
    out.push_back(c);
  }
  return out;
}

/// Whitespace split of already-normalized text, minus stop words.
inline std::vector<std::string> tokenize_and_filter(std::string_view cleaned,
                                                    const StopWords& stopwords) {
  std::vector<std::string> tokens;
  std::size_t i = 0;
  while (i < cleaned.size()) {
    while (i < cleaned.size() && detail::is_space(cleaned[i])) ++i;
    const std::size_t start = i;
    while (i < cleaned.size() && !detail::is_space(cleaned[i])) ++i;
    if (i > start) {
      const std::string_view tok = cleaned.substr(start, i - start);
      if (!stopwords.contains(tok)) tokens.emplace_back(tok);
    }
  }
  return tokens;
}

inline ProcessedDoc preprocess(std::string_view text, const StopWords& stopwords,
                               std::optional<std::size_t> source_index = std::nullopt) {
  return ProcessedDoc{tokenize_and_filter(normalize(text), stopwords), source_index};
}

/// One word per line; '#' starts a comment; blank lines ignored.
inline StopWords load_stopwords(std::istream& in) {
  StopWords words;
  std::string line;
  while (std::getline(in, line)) {
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    const std::string_view w = trim(line);
    if (w.empty()) continue;
    std::string lw(w);
    for (char& c : lw) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    words.insert(std::move(lw));
  }
  return words;
}

inline StopWords load_stopwords_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("preprocess", "cannot open stop-word file " + path);
  return load_stopwords(in);
}

}  // namespace fxsig
