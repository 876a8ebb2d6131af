#pragma once

// Single-position backtest of trading signals on OHLC bars.
//
// Execution model: a signal stamped at bar i is filled at the open of bar
// i+1. Bars are stamped at their close, so the fill instant is recorded as
// the close time of bar i. Fills are worsened by the per-side slippage. An
// open position exits at the next open after an opposite signal, after
// max_hold_bars bars, or at the final close.

#include <algorithm>
#include <map>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "fxsig/common.hpp"
#include "fxsig/ingest.hpp"
#include "fxsig/signals.hpp"

namespace fxsig {

struct BacktestConfig {
  double slippage_per_side = 0.0;  // price units
  int max_hold_bars = 42;
  double fee_per_side = 0.0;  // fraction of entry price

  void validate() const {
    if (!(slippage_per_side >= 0.0) || !std::isfinite(slippage_per_side))
      throw Error("backtest", "slippage_per_side must be >= 0");
    if (max_hold_bars < 1) throw Error("backtest", "max_hold_bars must be >= 1");
    if (!(fee_per_side >= 0.0) || !std::isfinite(fee_per_side))
      throw Error("backtest", "fee_per_side must be >= 0");
  }
};

enum class Side : std::uint8_t { Long, Short };
enum class ExitReason : std::uint8_t { opposite_signal, max_hold, end_of_data };

constexpr std::string_view to_string(Side s) noexcept { return s == Side::Long ? "long" : "short"; }
constexpr std::string_view to_string(ExitReason r) noexcept {
  switch (r) {
    case ExitReason::opposite_signal: return "opposite_signal";
    case ExitReason::max_hold: return "max_hold";
    case ExitReason::end_of_data: return "end_of_data";
  }
  return "?";
}

struct Trade {
  Side direction = Side::Long;
  Timestamp entry_time{};
  double entry_price = 0.0;
  Timestamp exit_time{};
  double exit_price = 0.0;
  double return_frac = 0.0;
  ExitReason exit_reason = ExitReason::end_of_data;
};

struct EquityPoint {
  Timestamp timestamp{};
  double equity = 1.0;
};

struct BacktestReport {
  std::string pair;
  BacktestConfig config;
  std::vector<Trade> trades;
  double cumulative_return_frac = 0.0;  // prod(1 + r) - 1
  std::size_t trade_count = 0;
  double win_rate = 0.0;
  double max_drawdown_frac = 0.0;
  std::vector<EquityPoint> equity_curve;  // starts at 1.0, one point per closed trade
  std::vector<std::string> diagnostics;
};

/// Per-trade return for a unit position, fees charged on both sides.
inline double trade_return(Side side, double entry, double exit, double fee_per_side) noexcept {
  const double gross = side == Side::Long ? (exit - entry) / entry : (entry - exit) / entry;
  return gross - 2.0 * fee_per_side;
}

inline BacktestReport run_backtest(const PriceSeries& series, std::span<const TimedSignal> signals,
                                   const BacktestConfig& config = {}) {
  config.validate();
  const auto& bars = series.bars;
  if (bars.empty()) throw Error("backtest", "empty price series");

  std::vector<Direction> wanted(bars.size(), Direction::None);
  for (const auto& s : signals) {
    const auto it = std::lower_bound(bars.begin(), bars.end(), s.timestamp,
                                     [](const Candle& c, Timestamp t) { return c.date < t; });
    if (it == bars.end() || it->date != s.timestamp)
      throw Error("backtest", "signal timestamp " + format_iso8601(s.timestamp) +
                                  " not found in " + series.pair + " price series");
    const auto i = static_cast<std::size_t>(it - bars.begin());
    if (wanted[i] != Direction::None && s.signal.direction != Direction::None &&
        wanted[i] != s.signal.direction)
      throw Error("backtest", "conflicting signals at " + format_iso8601(s.timestamp));
    if (s.signal.direction != Direction::None) wanted[i] = s.signal.direction;
  }

  BacktestReport rep;
  rep.pair = series.pair;
  rep.config = config;
  rep.equity_curve.push_back({bars.front().date, 1.0});

  struct Position {
    Side side;
    std::size_t entry_bar;
    Timestamp entry_time;
    double entry_price;
  };
  std::optional<Position> pos;
  double equity = 1.0;
  double peak = 1.0;

  auto worsen = [&](Side side, bool entering, double price) {
    // Slippage: longs fill higher on entry, lower on exit; shorts mirror.
    const bool pay_up = (side == Side::Long) == entering;
    const double p = pay_up ? price + config.slippage_per_side : price - config.slippage_per_side;
    if (!(p > 0.0)) throw Error("backtest", "slippage drives fill price to or below zero");
    return p;
  };
  auto close_position = [&](Timestamp when, double raw_price, ExitReason why) {
    Trade t;
    t.direction = pos->side;
    t.entry_time = pos->entry_time;
    t.entry_price = pos->entry_price;
    t.exit_time = when;
    t.exit_price = worsen(pos->side, false, raw_price);
    t.return_frac = trade_return(t.direction, t.entry_price, t.exit_price, config.fee_per_side);
    t.exit_reason = why;
    rep.trades.push_back(t);
    equity *= 1.0 + t.return_frac;
    peak = std::max(peak, equity);
    rep.max_drawdown_frac = std::max(rep.max_drawdown_frac, (peak - equity) / peak);
    rep.equity_curve.push_back({when, equity});
    pos.reset();
  };

  for (std::size_t k = 1; k < bars.size(); ++k) {
    const Direction sig = wanted[k - 1];
    const Timestamp fill_time = bars[k - 1].date;
    const double open = bars[k].open;
    bool closed_by_signal = false;
    if (pos) {
      const bool opposite = (pos->side == Side::Long && sig == Direction::Sell) ||
                            (pos->side == Side::Short && sig == Direction::Buy);
      if (opposite) {
        close_position(fill_time, open, ExitReason::opposite_signal);
        closed_by_signal = true;
      } else if (k - pos->entry_bar >= static_cast<std::size_t>(config.max_hold_bars)) {
        close_position(fill_time, open, ExitReason::max_hold);
      }
    }
    if (sig == Direction::None || closed_by_signal) continue;
    if (pos) {
      rep.diagnostics.push_back("ignored " + std::string(to_string(sig)) + " at " +
                                format_iso8601(fill_time) + ": position already open");
      continue;
    }
    const Side side = sig == Direction::Buy ? Side::Long : Side::Short;
    pos = Position{side, k, fill_time, worsen(side, true, open)};
  }
  if (wanted.back() != Direction::None)
    rep.diagnostics.push_back("signal at final bar " + format_iso8601(bars.back().date) +
                              " has no next bar to fill");
  if (pos) close_position(bars.back().date, bars.back().close, ExitReason::end_of_data);

  rep.trade_count = rep.trades.size();
  const auto wins = std::count_if(rep.trades.begin(), rep.trades.end(),
                                  [](const Trade& t) { return t.return_frac > 0.0; });
  rep.win_rate = rep.trades.empty() ? 0.0 : static_cast<double>(wins) / static_cast<double>(rep.trades.size());
  rep.cumulative_return_frac = equity - 1.0;
  return rep;
}

// ---------------------------------------------------------------------------
// Report output

inline nlohmann::ordered_json to_json(const BacktestReport& r) {
  nlohmann::ordered_json j;
  j["pair"] = r.pair;
  j["config"] = {{"slippage_per_side", r.config.slippage_per_side},
                 {"max_hold_bars", r.config.max_hold_bars},
                 {"fee_per_side", r.config.fee_per_side}};
  j["trade_count"] = r.trade_count;
  j["cumulative_return_frac"] = r.cumulative_return_frac;
  j["win_rate"] = r.win_rate;
  j["max_drawdown_frac"] = r.max_drawdown_frac;
  auto& trades = j["trades"] = nlohmann::ordered_json::array();
  for (const auto& t : r.trades)
    trades.push_back({{"direction", to_string(t.direction)},
                      {"entry_time", format_iso8601(t.entry_time)},
                      {"entry_price", t.entry_price},
                      {"exit_time", format_iso8601(t.exit_time)},
                      {"exit_price", t.exit_price},
                      {"return_frac", t.return_frac},
                      {"exit_reason", to_string(t.exit_reason)}});
  auto& curve = j["equity_curve"] = nlohmann::ordered_json::array();
  for (const auto& p : r.equity_curve)
    curve.push_back({{"timestamp", format_iso8601(p.timestamp)}, {"equity", p.equity}});
  j["diagnostics"] = r.diagnostics;
  return j;
}

inline void write_backtest_text(std::ostream& out, const BacktestReport& r) {
  out << "Backtest " << r.pair << '\n'
      << "  slippage/side      " << format_shortest(r.config.slippage_per_side) << '\n'
      << "  fee/side           " << format_shortest(r.config.fee_per_side) << '\n'
      << "  max hold (bars)    " << r.config.max_hold_bars << '\n'
      << "  trades             " << r.trade_count << '\n'
      << "  win rate           " << format_fixed(100.0 * r.win_rate, 2) << "%\n"
      << "  cumulative return  " << format_fixed(100.0 * r.cumulative_return_frac, 4) << "%\n"
      << "  max drawdown       " << format_fixed(100.0 * r.max_drawdown_frac, 4) << "%\n";
  if (r.trades.empty()) return;
  auto pad = [](std::string s, std::size_t w) {
    if (s.size() < w) s.insert(0, w - s.size(), ' ');
    return s;
  };
  out << "\n     # dir    entry_time            entry     exit_time             exit       return%  reason\n";
  for (std::size_t i = 0; i < r.trades.size(); ++i) {
    const auto& t = r.trades[i];
    out << "  " << pad(std::to_string(i + 1), 4) << ' ' << (t.direction == Side::Long ? "long " : "short") << "  "
        << format_iso8601(t.entry_time) << "  " << format_fixed(t.entry_price, 5) << "  "
        << format_iso8601(t.exit_time) << "  " << format_fixed(t.exit_price, 5) << "  "
        << pad(format_fixed(100.0 * t.return_frac, 4), 8) << "  " << to_string(t.exit_reason) << '\n';
  }
}

inline void write_equity_csv(std::ostream& out, const BacktestReport& r) {
  out << "timestamp,equity\n";
  for (const auto& p : r.equity_curve) out << format_iso8601(p.timestamp) << ',' << format_shortest(p.equity) << '\n';
}

}  // namespace fxsig
