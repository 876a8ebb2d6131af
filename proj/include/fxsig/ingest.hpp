#pragma once

// Typed ingestion of the two input corpora: timestamped news/social posts
// and OHLC price history in the Investing.com export layout
// (Date, Price, Open, High, Low, Vol., Change %).

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <istream>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "fxsig/common.hpp"
#include "fxsig/csv.hpp"

namespace fxsig {

struct NewsRecord {
  Timestamp timestamp{};
  std::string source;
  std::string pair;  // normalized, e.g. "EURUSD"
  double relevance_weight = 1.0;
  std::string text;
  std::optional<ClassLabel> label;  // present only in training corpora
};

struct Candle {
  Timestamp date{};  // bar close
  double close = 0.0;
  double open = 0.0;
  double high = 0.0;
  double low = 0.0;
  std::optional<std::int64_t> volume;
  std::optional<double> change_frac;  // +0.48% is stored as 0.0048

  friend bool operator==(const Candle&, const Candle&) = default;
};

enum class Timeframe : std::uint8_t { H4, D1, MN };

constexpr std::string_view to_string(Timeframe tf) noexcept {
  switch (tf) {
    case Timeframe::H4: return "H4";
    case Timeframe::D1: return "D1";
    case Timeframe::MN: return "MN";
  }
  return "?";
}

inline std::optional<Timeframe> parse_timeframe(std::string_view s) noexcept {
  if (s == "H4") return Timeframe::H4;
  if (s == "D1") return Timeframe::D1;
  if (s == "MN") return Timeframe::MN;
  return std::nullopt;
}

struct PriceSeries {
  std::string pair;
  Timeframe timeframe = Timeframe::H4;
  std::vector<Candle> bars;  // strictly ascending by date

  friend bool operator==(const PriceSeries&, const PriceSeries&) = default;
};

// ---------------------------------------------------------------------------
// News

namespace detail {

inline std::string lower_ascii(std::string_view s) {
  std::string out(s);
  for (char& c : out)
    if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
  return out;
}

}  // namespace detail

/// Streams records from a news CSV with header
/// `timestamp,source,pair,weight,label,text`. An empty weight defaults to 1.
inline void for_each_news_record(std::istream& in,
                                 const std::function<void(NewsRecord&&)>& sink) {
  static constexpr std::array<std::string_view, 6> kHeader{
      "timestamp", "source", "pair", "weight", "label", "text"};
  csv::Reader reader(in, ',', "ingest");
  std::vector<std::string> f;
  if (!reader.next(f)) throw ParseError("ingest", 1, "", "news file has no header");
  csv::strip_bom(f[0]);
  bool header_ok = f.size() == kHeader.size();
  for (std::size_t i = 0; header_ok && i < f.size(); ++i)
    header_ok = detail::lower_ascii(trim(f[i])) == kHeader[i];
  if (!header_ok)
    throw ParseError("ingest", 1, "", "news header must be timestamp,source,pair,weight,label,text");

  while (reader.next(f)) {
    const std::size_t row = reader.line();
    const auto where = " at row " + std::to_string(row);
    if (f.size() != kHeader.size())
      throw ParseError("ingest", row, "", "expected 6 fields, got " + std::to_string(f.size()) + where);

    NewsRecord rec;
    const auto ts = parse_iso8601(trim(f[0]));
    if (!ts)
      throw ParseError("ingest", row, "timestamp",
                       "unparseable timestamp '" + f[0] + "'" + where);
    rec.timestamp = *ts;
    rec.source = std::string(trim(f[1]));
    rec.pair = normalize_pair(trim(f[2]));
    if (rec.pair.empty()) throw ParseError("ingest", row, "pair", "empty pair" + where);

    const std::string_view w = trim(f[3]);
    if (!w.empty()) {
      const auto weight = parse_double(w);
      if (!weight)
        throw ParseError("ingest", row, "weight", "unparseable weight '" + f[3] + "'" + where);
      if (*weight <= 0.0) throw ParseError("ingest", row, "weight", "nonpositive weight" + where);
      rec.relevance_weight = *weight;
    }

    const std::string label = detail::lower_ascii(trim(f[4]));
    if (!label.empty()) {
      rec.label = parse_label(label);
      if (!rec.label)
        throw ParseError("ingest", row, "label", "unknown label '" + f[4] + "'" + where);
    }

    rec.text = std::string(trim(f[5]));
    if (rec.text.empty()) throw ParseError("ingest", row, "text", "empty text" + where);
    sink(std::move(rec));
  }
}

inline std::vector<NewsRecord> parse_news_csv(std::istream& in) {
  std::vector<NewsRecord> out;
  for_each_news_record(in, [&](NewsRecord&& r) { out.push_back(std::move(r)); });
  return out;
}

inline void write_news_csv(std::ostream& out, const std::vector<NewsRecord>& records) {
  out << "timestamp,source,pair,weight,label,text\n";
  for (const auto& r : records) {
    out << format_iso8601(r.timestamp) << ',' << csv::escape(r.source) << ',' << r.pair << ','
        << format_shortest(r.relevance_weight) << ','
        << (r.label ? to_string(*r.label) : std::string_view{}) << ',' << csv::escape(r.text)
        << '\n';
  }
}

// ---------------------------------------------------------------------------
// Price history

/// How to treat bars whose open or close lies outside [low, high]. The
/// published Investing.com tables contain such rows, so they are tolerated
/// unless the caller asks otherwise. high < low is always an error.
enum class BarRangeCheck : std::uint8_t { tolerate, reject };

struct OhlcParseOptions {
  BarRangeCheck range_check = BarRangeCheck::tolerate;
};

namespace detail {

// Removes thousands separators and stray commas ("1,234.5", "1.3475,").
inline std::string strip_numeric_noise(std::string_view cell) {
  std::string out;
  for (char c : trim(cell))
    if (c != ',' && c != ' ' && c != '"') out.push_back(c);
  return out;
}

// Parses `text` as a decimal scaled by 10^exp10 without a rounding step of
// its own: the exponent is folded into the literal before conversion.
inline std::optional<double> parse_scaled(std::string text, int exp10) {
  if (text.empty()) return std::nullopt;
  if (exp10 != 0) {
    const auto e = text.find_first_of("eE");
    if (e == std::string::npos) {
      text += "e" + std::to_string(exp10);
    } else {
      int existing = 0;
      const std::string_view tail = std::string_view(text).substr(e + 1);
      const char* b = tail.data() + (tail.starts_with('+') ? 1 : 0);
      auto [p, ec] = std::from_chars(b, tail.data() + tail.size(), existing);
      if (ec != std::errc{} || p != tail.data() + tail.size()) return std::nullopt;
      text = text.substr(0, e) + "e" + std::to_string(existing + exp10);
    }
  }
  return parse_double(text);
}

inline std::string header_key(std::string_view h) {
  std::string k;
  for (char c : h) {
    if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
    if ((c >= 'a' && c <= 'z') || (c >= '0' && c <= '9')) k.push_back(c);
  }
  if (k == "close") return "price";
  if (k == "volume") return "vol";
  if (k == "changepct" || k == "changepercent") return "change";
  return k;
}

}  // namespace detail

/// "55.83K" -> 55830; blank or "-" -> absent.
inline std::optional<std::optional<std::int64_t>> parse_volume_cell(std::string_view cell) {
  std::string t = detail::strip_numeric_noise(cell);
  if (t.empty() || t == "-") return std::optional<std::int64_t>{};
  int exp10 = 0;
  switch (t.back()) {
    case 'K': case 'k': exp10 = 3; break;
    case 'M': case 'm': exp10 = 6; break;
    case 'B': case 'b': exp10 = 9; break;
    default: break;
  }
  if (exp10 != 0) t.pop_back();
  const auto v = detail::parse_scaled(t, exp10);
  if (!v || *v < 0.0 || *v > 9.0e18) return std::nullopt;
  return std::optional<std::int64_t>{std::llround(*v)};
}

/// "+0.48%" -> 0.0048; blank or "-" -> absent.
inline std::optional<std::optional<double>> parse_change_cell(std::string_view cell) {
  std::string t = detail::strip_numeric_noise(cell);
  if (t.empty() || t == "-") return std::optional<double>{};
  if (t.back() == '%') t.pop_back();
  const auto v = detail::parse_scaled(t, -2);
  if (!v) return std::nullopt;
  return std::optional<double>{*v};
}

inline std::optional<double> parse_price_cell(std::string_view cell) {
  return parse_double(detail::strip_numeric_noise(cell));
}

/// Renders `v` scaled by 10^places in plain decimal, exactly (digit shift,
/// no multiplication). Used so percentages survive a write/parse cycle.
inline std::string shift_decimal(double v, int places) {
  if (v == 0.0) return "0";
  std::array<char, 64> buf{};
  auto [p, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v, std::chars_format::scientific);
  std::string_view sci(buf.data(), static_cast<std::size_t>(p - buf.data()));
  std::string sign;
  if (sci.front() == '-') {
    sign = "-";
    sci.remove_prefix(1);
  }
  const auto e = sci.find('e');
  std::string digits;
  for (char c : sci.substr(0, e))
    if (c != '.') digits.push_back(c);
  int exp10 = 0;
  const std::string_view es = sci.substr(e + 1);
  std::from_chars(es.data() + (es.front() == '+' ? 1 : 0), es.data() + es.size(), exp10);
  const int point = exp10 + 1 + places;  // digits before the decimal point
  const int n = static_cast<int>(digits.size());
  if (point <= 0) return sign + "0." + std::string(static_cast<std::size_t>(-point), '0') + digits;
  if (point >= n) return sign + digits + std::string(static_cast<std::size_t>(point - n), '0');
  return sign + digits.substr(0, static_cast<std::size_t>(point)) + "." +
         digits.substr(static_cast<std::size_t>(point));
}

/// Dates of bars whose open or close lies outside [low, high].
inline std::vector<Timestamp> range_violations(const PriceSeries& series) {
  std::vector<Timestamp> out;
  for (const auto& b : series.bars)
    if (b.low > std::min(b.open, b.close) || b.high < std::max(b.open, b.close))
      out.push_back(b.date);
  return out;
}

/// Enforces the series invariants; sorts bars ascending by date first.
inline void validate_series(PriceSeries& series, const OhlcParseOptions& options = {}) {
  std::sort(series.bars.begin(), series.bars.end(),
            [](const Candle& a, const Candle& b) { return a.date < b.date; });
  for (std::size_t i = 0; i < series.bars.size(); ++i) {
    const Candle& b = series.bars[i];
    const std::string when = format_us_date(b.date);
    if (!(b.open > 0 && b.high > 0 && b.low > 0 && b.close > 0))
      throw Error("ingest", "nonpositive price at " + when);
    if (b.high < b.low) throw Error("ingest", "high < low at " + when);
    if (options.range_check == BarRangeCheck::reject &&
        (b.low > std::min(b.open, b.close) || b.high < std::max(b.open, b.close)))
      throw Error("ingest", "open/close outside [low, high] at " + when);
    if (i > 0 && series.bars[i - 1].date == b.date)
      throw Error("ingest", "duplicate timestamp " + when);
  }
}

/// Parses an OHLC export. Comma- or tab-separated (detected from the header),
/// columns located by name, rows in any order.
inline PriceSeries parse_ohlc_csv(std::istream& in, std::string_view pair, Timeframe timeframe,
                                  const OhlcParseOptions& options = {}) {
  csv::Reader reader(in, 0, "ingest");
  std::vector<std::string> f;
  if (!reader.next(f)) throw ParseError("ingest", 1, "", "price file has no header");
  csv::strip_bom(f[0]);

  enum Col { kDate, kPrice, kOpen, kHigh, kLow, kVol, kChange, kCount };
  static constexpr std::array<std::string_view, kCount> kKeys{"date", "price", "open", "high",
                                                              "low",  "vol",   "change"};
  static constexpr std::array<std::string_view, kCount> kNames{
      "Date", "Price", "Open", "High", "Low", "Vol.", "Change %"};
  std::array<std::optional<std::size_t>, kCount> col{};
  for (std::size_t i = 0; i < f.size(); ++i) {
    const std::string key = detail::header_key(f[i]);
    for (std::size_t c = 0; c < kCount; ++c)
      if (key == kKeys[c] && !col[c]) col[c] = i;
  }
  for (std::size_t c = kDate; c <= kLow; ++c)
    if (!col[c])
      throw ParseError("ingest", 1, std::string(kNames[c]),
                       "price header lacks column " + std::string(kNames[c]));

  PriceSeries series{normalize_pair(pair), timeframe, {}};
  while (reader.next(f)) {
    const std::size_t row = reader.line();
    auto cell = [&](std::size_t c) -> std::string_view {
      if (!col[c] || *col[c] >= f.size()) return {};
      return f[*col[c]];
    };
    auto fail = [&](std::size_t c) -> ParseError {
      return ParseError("ingest", row, std::string(kNames[c]),
                        "unparseable " + std::string(kNames[c]) + " '" + std::string(cell(c)) +
                            "' at row " + std::to_string(row));
    };

    Candle bar;
    const std::string_view date_text = trim(cell(kDate));
    auto date = parse_us_date(date_text);
    if (!date) date = parse_iso8601(date_text);
    if (!date) throw fail(kDate);
    bar.date = *date;

    double* prices[] = {&bar.close, &bar.open, &bar.high, &bar.low};
    for (std::size_t c = kPrice; c <= kLow; ++c) {
      const auto v = parse_price_cell(cell(c));
      if (!v) throw fail(c);
      *prices[c - kPrice] = *v;
    }
    const auto vol = parse_volume_cell(cell(kVol));
    if (!vol) throw fail(kVol);
    bar.volume = *vol;
    const auto chg = parse_change_cell(cell(kChange));
    if (!chg) throw fail(kChange);
    bar.change_frac = *chg;
    series.bars.push_back(bar);
  }
  validate_series(series, options);
  return series;
}

/// Canonical CSV form: ascending dates, shortest round-trip numbers.
inline void write_ohlc_csv(std::ostream& out, const PriceSeries& series) {
  out << "Date,Price,Open,High,Low,Vol.,Change %\n";
  for (const auto& b : series.bars) {
    out << format_us_date(b.date) << ',' << format_shortest(b.close) << ','
        << format_shortest(b.open) << ',' << format_shortest(b.high) << ','
        << format_shortest(b.low) << ',';
    if (b.volume) out << *b.volume;
    out << ',';
    if (b.change_frac) out << (*b.change_frac > 0 ? "+" : "") << shift_decimal(*b.change_frac, 2) << '%';
    out << '\n';
  }
}

}  // namespace fxsig
