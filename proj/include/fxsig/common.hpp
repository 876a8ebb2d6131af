#pragma once

// Shared vocabulary for the fxsig library: error types, class labels,
// timestamps and locale-independent number formatting.

#include <array>
#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <system_error>

namespace fxsig {

/// Base error. Every message is prefixed with the module that raised it.
class Error : public std::runtime_error {
 public:
  Error(std::string module, const std::string& what)
      : std::runtime_error(module + ": " + what), module_(std::move(module)) {}

  const std::string& module() const noexcept { return module_; }

 private:
  std::string module_;
};

/// Input error tied to a location in a file (row is the 1-based record
/// number, header included).
class ParseError : public Error {
 public:
  ParseError(std::string module, std::size_t row, std::string field,
             const std::string& what)
      : Error(std::move(module), what), row_(row), field_(std::move(field)) {}

  std::size_t row() const noexcept { return row_; }
  const std::string& field() const noexcept { return field_; }

 private:
  std::size_t row_;
  std::string field_;
};

enum class ClassLabel : std::uint8_t { negative = 0, neutral = 1, positive = 2 };

inline constexpr std::array<ClassLabel, 3> kAllLabels{
    ClassLabel::negative, ClassLabel::neutral, ClassLabel::positive};

constexpr std::size_t index_of(ClassLabel c) noexcept {
  return static_cast<std::size_t>(c);
}

constexpr std::string_view to_string(ClassLabel c) noexcept {
  switch (c) {
    case ClassLabel::negative: return "negative";
    case ClassLabel::neutral: return "neutral";
    case ClassLabel::positive: return "positive";
  }
  return "?";
}

inline std::optional<ClassLabel> parse_label(std::string_view s) noexcept {
  if (s == "negative") return ClassLabel::negative;
  if (s == "neutral") return ClassLabel::neutral;
  if (s == "positive") return ClassLabel::positive;
  return std::nullopt;
}

/// A classifier decision; std::nullopt means the classifier abstained.
using Prediction = std::optional<ClassLabel>;

/// Which sentiment engine produced a score.
enum class Engine : std::uint8_t { lexicon, nbayes };

constexpr std::string_view to_string(Engine e) noexcept {
  return e == Engine::lexicon ? "lexicon" : "nbayes";
}

inline std::optional<Engine> parse_engine(std::string_view s) noexcept {
  if (s == "lexicon") return Engine::lexicon;
  if (s == "nbayes") return Engine::nbayes;
  return std::nullopt;
}

using Timestamp = std::chrono::sys_seconds;

namespace detail {

inline bool parse_uint(std::string_view s, int& out) noexcept {
  if (s.empty()) return false;
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  return ec == std::errc{} && p == s.data() + s.size() && out >= 0;
}

inline std::optional<Timestamp> make_instant(int y, int mo, int d, int h,
                                             int mi, int sec) noexcept {
  using namespace std::chrono;
  const year_month_day ymd{year{y}, month{static_cast<unsigned>(mo)},
                           day{static_cast<unsigned>(d)}};
  if (!ymd.ok() || h > 23 || mi > 59 || sec > 60) return std::nullopt;
  return sys_days{ymd} + hours{h} + minutes{mi} + seconds{sec};
}

// Parses "HH:MM[:SS[.fraction]]"; fractional seconds are truncated.
inline bool parse_clock(std::string_view s, int& h, int& mi, int& sec) noexcept {
  sec = 0;
  if (s.size() < 5 || s[2] != ':') return false;
  if (!parse_uint(s.substr(0, 2), h) || !parse_uint(s.substr(3, 2), mi)) return false;
  if (s.size() == 5) return true;
  if (s[5] != ':' || s.size() < 8 || !parse_uint(s.substr(6, 2), sec)) return false;
  if (s.size() == 8) return true;
  if (s[8] != '.') return false;
  for (char c : s.substr(9))
    if (c < '0' || c > '9') return false;
  return s.size() > 9;
}

inline std::string pad2(unsigned v) {
  std::string s = std::to_string(v);
  return v < 10 ? "0" + s : s;
}

}  // namespace detail

/// ISO-8601: `YYYY-MM-DD`, optionally followed by `T` (or a space) and
/// `HH:MM[:SS[.f]]`, optionally suffixed by `Z` or a `+HH:MM`/`-HH:MM`
/// offset. A missing suffix means UTC.
inline std::optional<Timestamp> parse_iso8601(std::string_view s) noexcept {
  if (s.size() < 10 || s[4] != '-' || s[7] != '-') return std::nullopt;
  int y = 0, mo = 0, d = 0, h = 0, mi = 0, sec = 0;
  if (!detail::parse_uint(s.substr(0, 4), y) || !detail::parse_uint(s.substr(5, 2), mo) ||
      !detail::parse_uint(s.substr(8, 2), d))
    return std::nullopt;
  std::chrono::seconds offset{0};
  if (s.size() > 10) {
    if (s[10] != 'T' && s[10] != ' ') return std::nullopt;
    std::string_view clock = s.substr(11);
    if (!clock.empty() && clock.back() == 'Z') {
      clock.remove_suffix(1);
    } else if (clock.size() > 6 &&
               (clock[clock.size() - 6] == '+' || clock[clock.size() - 6] == '-') &&
               clock[clock.size() - 3] == ':') {
      const std::string_view off = clock.substr(clock.size() - 6);
      int oh = 0, om = 0;
      if (!detail::parse_uint(off.substr(1, 2), oh) || !detail::parse_uint(off.substr(4, 2), om))
        return std::nullopt;
      offset = std::chrono::hours{oh} + std::chrono::minutes{om};
      if (off[0] == '-') offset = -offset;
      clock.remove_suffix(6);
    }
    if (!detail::parse_clock(clock, h, mi, sec)) return std::nullopt;
  }
  auto t = detail::make_instant(y, mo, d, h, mi, sec);
  if (!t) return std::nullopt;
  return *t - offset;
}

/// US-style price-history date `MM/DD/YYYY` with an optional ` HH:MM[:SS]`
/// suffix for intraday bars. Interpreted as UTC.
inline std::optional<Timestamp> parse_us_date(std::string_view s) noexcept {
  const auto s1 = s.find('/');
  const auto s2 = s1 == std::string_view::npos ? s1 : s.find('/', s1 + 1);
  if (s2 == std::string_view::npos) return std::nullopt;
  const auto sp = s.find(' ', s2);
  int y = 0, mo = 0, d = 0, h = 0, mi = 0, sec = 0;
  if (!detail::parse_uint(s.substr(0, s1), mo) ||
      !detail::parse_uint(s.substr(s1 + 1, s2 - s1 - 1), d))
    return std::nullopt;
  const std::string_view year_part = s.substr(s2 + 1, sp == std::string_view::npos ? sp : sp - s2 - 1);
  if (year_part.size() != 4 || !detail::parse_uint(year_part, y)) return std::nullopt;
  if (sp != std::string_view::npos) {
    std::string_view clock = s.substr(sp + 1);
    while (!clock.empty() && clock.front() == ' ') clock.remove_prefix(1);
    if (!detail::parse_clock(clock, h, mi, sec)) return std::nullopt;
  }
  return detail::make_instant(y, mo, d, h, mi, sec);
}

inline std::string format_iso8601(Timestamp t) {
  using namespace std::chrono;
  const auto day_start = floor<days>(t);
  const year_month_day ymd{day_start};
  const hh_mm_ss clock{t - day_start};
  return std::to_string(static_cast<int>(ymd.year())) + "-" +
         detail::pad2(static_cast<unsigned>(ymd.month())) + "-" +
         detail::pad2(static_cast<unsigned>(ymd.day())) + "T" +
         detail::pad2(static_cast<unsigned>(clock.hours().count())) + ":" +
         detail::pad2(static_cast<unsigned>(clock.minutes().count())) + ":" +
         detail::pad2(static_cast<unsigned>(clock.seconds().count())) + "Z";
}

/// `MM/DD/YYYY`, plus ` HH:MM:SS` when the instant is not midnight.
inline std::string format_us_date(Timestamp t) {
  using namespace std::chrono;
  const auto day_start = floor<days>(t);
  const year_month_day ymd{day_start};
  std::string out = detail::pad2(static_cast<unsigned>(ymd.month())) + "/" +
                    detail::pad2(static_cast<unsigned>(ymd.day())) + "/" +
                    std::to_string(static_cast<int>(ymd.year()));
  if (t != day_start) {
    const hh_mm_ss clock{t - day_start};
    out += " " + detail::pad2(static_cast<unsigned>(clock.hours().count())) + ":" +
           detail::pad2(static_cast<unsigned>(clock.minutes().count())) + ":" +
           detail::pad2(static_cast<unsigned>(clock.seconds().count()));
  }
  return out;
}

/// Shortest decimal text that parses back to exactly `v`.
inline std::string format_shortest(double v) {
  std::array<char, 64> buf{};
  auto [p, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  return std::string(buf.data(), p);
}

/// Fixed-point text with `digits` decimals, independent of the C locale.
inline std::string format_fixed(double v, int digits) {
  std::array<char, 512> buf{};
  auto [p, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v,
                               std::chars_format::fixed, digits);
  if (ec != std::errc{}) return format_shortest(v);
  return std::string(buf.data(), p);
}

/// Strict decimal parse of the whole string.
inline std::optional<double> parse_double(std::string_view s) noexcept {
  if (!s.empty() && s.front() == '+') s.remove_prefix(1);
  if (s.empty()) return std::nullopt;
  double v = 0.0;
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || p != s.data() + s.size() || !std::isfinite(v)) return std::nullopt;
  return v;
}

inline std::string_view trim(std::string_view s) noexcept {
  constexpr std::string_view ws = " \t\r\n\f\v";
  const auto b = s.find_first_not_of(ws);
  if (b == std::string_view::npos) return {};
  return s.substr(b, s.find_last_not_of(ws) - b + 1);
}

/// Currency-pair codes compare without separators or case: "EUR/USD" == "eurusd".
inline std::string normalize_pair(std::string_view s) {
  std::string out;
  for (char c : s) {
    if (c == '/' || c == ' ' || c == '-' || c == '_') continue;
    out.push_back(static_cast<char>(c >= 'a' && c <= 'z' ? c - 'a' + 'A' : c));
  }
  return out;
}

}  // namespace fxsig
