#pragma once

// Fusion of windowed sentiment with SMA/RSI confirmation into graded
// Buy/Sell signals. A signal needs all three conditions to agree; anything
// short of that, including exact equality at a boundary, yields None.

#include <algorithm>
#include <chrono>
#include <istream>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "fxsig/common.hpp"
#include "fxsig/csv.hpp"
#include "fxsig/indicators.hpp"
#include "fxsig/ingest.hpp"
#include "fxsig/lexicon.hpp"

namespace fxsig {

enum class Direction : std::uint8_t { None, Buy, Sell };
enum class Strength : std::uint8_t { Normal, Strong };

constexpr std::string_view to_string(Direction d) noexcept {
  switch (d) {
    case Direction::Buy: return "buy";
    case Direction::Sell: return "sell";
    case Direction::None: return "none";
  }
  return "?";
}

constexpr std::string_view to_string(Strength s) noexcept {
  return s == Strength::Strong ? "strong" : "normal";
}

struct FusionConfig {
  double pos_threshold = 0.05;
  double neg_threshold = -0.05;
  double strong_threshold = 0.5;
  std::chrono::seconds sentiment_window = std::chrono::hours{24};
  int min_docs = 1;

  void validate() const {
    if (!(0.0 < pos_threshold && pos_threshold < strong_threshold && strong_threshold <= 1.0))
      throw Error("signals", "thresholds must satisfy 0 < pos < strong <= 1");
    if (!(neg_threshold < 0.0)) throw Error("signals", "neg_threshold must be < 0");
    if (sentiment_window <= std::chrono::seconds{0})
      throw Error("signals", "sentiment window must be positive");
    if (min_docs < 1) throw Error("signals", "min_docs must be >= 1");
  }
};

struct SignalContext {
  Timestamp timestamp{};
  std::string pair;
  std::optional<SentimentScore> sentiment;  // absent when no documents fell in the window
  double close = 0.0;
  double sma_value = 0.0;
  double rsi_value = 50.0;
  std::size_t doc_count = 0;
};

/// Which conditions agreed with the direction the sentiment pointed to.
struct Rationale {
  bool sentiment = false;
  bool trend = false;     // close vs SMA
  bool momentum = false;  // RSI vs 50

  friend bool operator==(const Rationale&, const Rationale&) = default;
};

struct TradingSignal {
  Direction direction = Direction::None;
  std::optional<Strength> strength;  // set iff direction != None
  Rationale rationale;

  friend bool operator==(const TradingSignal&, const TradingSignal&) = default;
};

inline TradingSignal generate_signal(const SignalContext& ctx, const FusionConfig& config = {}) {
  TradingSignal out;
  if (!ctx.sentiment || ctx.doc_count == 0 ||
      ctx.doc_count < static_cast<std::size_t>(config.min_docs))
    return out;
  const double s = ctx.sentiment->value();
  if (s >= config.pos_threshold) {
    out.rationale = {true, ctx.close > ctx.sma_value, ctx.rsi_value > 50.0};
    if (out.rationale.trend && out.rationale.momentum) out.direction = Direction::Buy;
  } else if (s <= config.neg_threshold) {
    out.rationale = {true, ctx.close < ctx.sma_value, ctx.rsi_value < 50.0};
    if (out.rationale.trend && out.rationale.momentum) out.direction = Direction::Sell;
  }
  if (out.direction != Direction::None)
    out.strength = std::abs(s) >= config.strong_threshold ? Strength::Strong : Strength::Normal;
  return out;
}

/// One document's contribution to a window.
struct ScoredDoc {
  Timestamp timestamp{};
  std::string pair;
  SentimentScore score;
  double weight = 1.0;
};

struct SignalRow {
  SignalContext context;
  TradingSignal signal;
};

/// Builds a context for every bar where both indicators are defined. The
/// sentiment is the weighted aggregate of same-pair documents stamped in
/// [bar_close - window, bar_close).
inline std::vector<SignalContext> build_contexts(const PriceSeries& series,
                                                 std::span<const ScoredDoc> docs, int sma_period,
                                                 int rsi_period, const FusionConfig& config = {}) {
  config.validate();
  std::vector<double> closes;
  closes.reserve(series.bars.size());
  for (const auto& b : series.bars) closes.push_back(b.close);
  const auto ma = sma(closes, sma_period);
  const auto strength = rsi(closes, rsi_period);

  std::vector<const ScoredDoc*> mine;
  for (const auto& d : docs)
    if (d.pair == series.pair) mine.push_back(&d);
  std::stable_sort(mine.begin(), mine.end(),
                   [](const ScoredDoc* a, const ScoredDoc* b) { return a->timestamp < b->timestamp; });

  std::vector<SignalContext> out;
  std::vector<WeightedScore> window;
  for (std::size_t i = 0; i < series.bars.size(); ++i) {
    if (!ma.defined_at(i) || !strength.defined_at(i)) continue;
    const Candle& bar = series.bars[i];
    const Timestamp from = bar.date - config.sentiment_window;
    auto lo = std::lower_bound(mine.begin(), mine.end(), from,
                               [](const ScoredDoc* d, Timestamp t) { return d->timestamp < t; });
    auto hi = std::lower_bound(lo, mine.end(), bar.date,
                               [](const ScoredDoc* d, Timestamp t) { return d->timestamp < t; });
    window.clear();
    for (auto it = lo; it != hi; ++it) window.push_back({(*it)->score, (*it)->weight});

    SignalContext ctx;
    ctx.timestamp = bar.date;
    ctx.pair = series.pair;
    ctx.close = bar.close;
    ctx.sma_value = ma.at(i);
    ctx.rsi_value = strength.at(i);
    ctx.doc_count = window.size();
    if (!window.empty()) ctx.sentiment = aggregate_sentiment(window);
    out.push_back(std::move(ctx));
  }
  return out;
}

inline std::vector<SignalRow> generate_signals(std::span<const SignalContext> contexts,
                                               const FusionConfig& config = {}) {
  std::vector<SignalRow> rows;
  rows.reserve(contexts.size());
  for (const auto& c : contexts) rows.push_back({c, generate_signal(c, config)});
  return rows;
}

// ---------------------------------------------------------------------------
// Signals CSV: timestamp,pair,direction,strength,sentiment,close,sma,rsi,doc_count

inline constexpr std::string_view kSignalsHeader =
    "timestamp,pair,direction,strength,sentiment,close,sma,rsi,doc_count";

inline void write_signals_csv(std::ostream& out, std::span<const SignalRow> rows) {
  out << kSignalsHeader << '\n';
  for (const auto& r : rows) {
    const auto& c = r.context;
    out << format_iso8601(c.timestamp) << ',' << c.pair << ',' << to_string(r.signal.direction)
        << ',' << (r.signal.strength ? to_string(*r.signal.strength) : std::string_view{}) << ','
        << (c.sentiment ? format_fixed(c.sentiment->value(), 6) : std::string{}) << ','
        << format_shortest(c.close) << ',' << format_fixed(c.sma_value, 6) << ','
        << format_fixed(c.rsi_value, 4) << ',' << c.doc_count << '\n';
  }
}

struct TimedSignal {
  Timestamp timestamp{};
  TradingSignal signal;
};

/// Reads back the direction/strength columns of a signals CSV.
inline std::vector<TimedSignal> read_signals_csv(std::istream& in) {
  csv::Reader reader(in, ',', "signals");
  std::vector<std::string> f;
  if (!reader.next(f)) throw ParseError("signals", 1, "", "signals file has no header");
  csv::strip_bom(f[0]);
  std::string header;
  for (std::size_t i = 0; i < f.size(); ++i) header += (i ? "," : "") + std::string(trim(f[i]));
  if (header != kSignalsHeader) throw ParseError("signals", 1, "", "unexpected signals header");

  std::vector<TimedSignal> out;
  while (reader.next(f)) {
    const auto row = reader.line();
    const auto where = " at row " + std::to_string(row);
    if (f.size() != 9) throw ParseError("signals", row, "", "expected 9 fields" + where);
    TimedSignal s;
    const auto ts = parse_iso8601(trim(f[0]));
    if (!ts) throw ParseError("signals", row, "timestamp", "unparseable timestamp" + where);
    s.timestamp = *ts;
    const std::string_view dir = trim(f[2]);
    const std::string_view str = trim(f[3]);
    if (dir == "buy") s.signal.direction = Direction::Buy;
    else if (dir == "sell") s.signal.direction = Direction::Sell;
    else if (dir != "none") throw ParseError("signals", row, "direction", "bad direction" + where);
    if (s.signal.direction != Direction::None) {
      if (str == "strong") s.signal.strength = Strength::Strong;
      else if (str == "normal") s.signal.strength = Strength::Normal;
      else throw ParseError("signals", row, "strength", "bad strength" + where);
    } else if (!str.empty()) {
      throw ParseError("signals", row, "strength", "strength on a none signal" + where);
    }
    out.push_back(s);
  }
  return out;
}

inline std::vector<TimedSignal> timed_signals(std::span<const SignalRow> rows) {
  std::vector<TimedSignal> out;
  out.reserve(rows.size());
  for (const auto& r : rows) out.push_back({r.context.timestamp, r.signal});
  return out;
}

}  // namespace fxsig
