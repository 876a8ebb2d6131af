#pragma once

// Streaming RFC 4180 record reader. Handles quoted cells with embedded
// delimiters, doubled quotes and newlines, and CRLF line endings.

#include <istream>
#include <string>
#include <string_view>
#include <vector>

#include "fxsig/common.hpp"

namespace fxsig::csv {

class Reader {
 public:
  /// delimiter 0 selects tab when the first line contains one, comma otherwise.
  explicit Reader(std::istream& in, char delimiter = ',', std::string module = "csv")
      : in_(in), delim_(delimiter), module_(std::move(module)) {
    if (delim_ == 0) {
      std::getline(in_, pending_);
      delim_ = pending_.find('\t') != std::string::npos ? '\t' : ',';
      if (!in_.eof()) pending_.push_back('\n');
    }
  }

  /// Reads the next record into `fields`. Returns false at end of input.
  /// Blank lines are skipped.
  bool next(std::vector<std::string>& fields) {
    for (;;) {
      fields.clear();
      if (!read_record(fields)) return false;
      if (!(fields.size() == 1 && trim(fields[0]).empty())) return true;
    }
  }

  /// Physical line on which the most recent record started (1-based).
  std::size_t line() const noexcept { return record_line_; }
  char delimiter() const noexcept { return delim_; }

 private:
  int get() {
    if (pos_ < pending_.size()) return static_cast<unsigned char>(pending_[pos_++]);
    return in_.get();
  }
  int peek() {
    if (pos_ < pending_.size()) return static_cast<unsigned char>(pending_[pos_]);
    return in_.peek();
  }

  bool read_record(std::vector<std::string>& fields) {
    int c = get();
    if (c == std::char_traits<char>::eof()) return false;
    record_line_ = ++line_;
    std::string cell;
    bool quoted = false;
    bool was_quoted = false;
    for (;; c = get()) {
      if (c == std::char_traits<char>::eof()) {
        if (quoted) throw ParseError(module_, record_line_, "", "unterminated quoted cell");
        break;
      }
      const char ch = static_cast<char>(c);
      if (quoted) {
        if (ch == '"') {
          if (peek() == '"') {
            get();
            cell.push_back('"');
          } else {
            quoted = false;
          }
        } else {
          if (ch == '\n') ++line_;
          cell.push_back(ch);
        }
        continue;
      }
      if (ch == '"' && !was_quoted && trim(cell).empty()) {
        cell.clear();
        quoted = true;
        was_quoted = true;
      } else if (ch == delim_) {
        fields.push_back(std::move(cell));
        cell.clear();
        was_quoted = false;
      } else if (ch == '\n') {
        break;
      } else if (ch == '\r') {
        if (peek() == '\n') get();
        break;
      } else {
        cell.push_back(ch);
      }
    }
    fields.push_back(std::move(cell));
    return true;
  }

  std::istream& in_;
  char delim_;
  std::string module_;
  std::string pending_;
  std::size_t pos_ = 0;
  std::size_t line_ = 0;
  std::size_t record_line_ = 0;
};

/// Quotes a cell when it holds a delimiter, quote or line break.
inline std::string escape(std::string_view cell, char delimiter = ',') {
  if (cell.find_first_of(std::string{'"', '\n', '\r', delimiter}) == std::string_view::npos)
    return std::string(cell);
  std::string out = "\"";
  for (char c : cell) {
    if (c == '"') out.push_back('"');
    out.push_back(c);
  }
  out.push_back('"');
  return out;
}

/// Drops a UTF-8 byte-order mark.
inline void strip_bom(std::string& s) {
  if (s.size() >= 3 && s.compare(0, 3, "\xEF\xBB\xBF") == 0) s.erase(0, 3);
}

}  // namespace fxsig::csv
