#pragma once

// Simple moving average and Wilder's relative strength index over closes.

#include <span>
#include <vector>

#include "fxsig/common.hpp"

namespace fxsig {

enum class IndicatorKind : std::uint8_t { SMA, RSI };

/// values[k] belongs to bar `first_index + k`; earlier bars are undefined.
struct IndicatorSeries {
  IndicatorKind kind;
  int period;
  std::size_t first_index;
  std::vector<double> values;

  bool defined_at(std::size_t bar) const noexcept {
    return bar >= first_index && bar - first_index < values.size();
  }
  double at(std::size_t bar) const { return values.at(bar - first_index); }
};

inline IndicatorSeries sma(std::span<const double> closes, int period) {
  if (period < 1) throw Error("indicators", "SMA period must be >= 1");
  const auto p = static_cast<std::size_t>(period);
  if (closes.size() < p)
    throw Error("indicators", "insufficient history for SMA(" + std::to_string(period) + ")");
  IndicatorSeries out{IndicatorKind::SMA, period, p - 1, {}};
  out.values.reserve(closes.size() - p + 1);
  for (std::size_t i = p - 1; i < closes.size(); ++i) {
    double s = 0.0;
    for (std::size_t j = i + 1 - p; j <= i; ++j) s += closes[j];
    out.values.push_back(s / static_cast<double>(p));
  }
  return out;
}

namespace detail {

inline double rsi_from_averages(double avg_gain, double avg_loss) noexcept {
  if (avg_loss == 0.0) return avg_gain == 0.0 ? 50.0 : 100.0;
  if (avg_gain == 0.0) return 0.0;
  const double rsi = 100.0 - 100.0 / (1.0 + avg_gain / avg_loss);
  return rsi < 0.0 ? 0.0 : (rsi > 100.0 ? 100.0 : rsi);
}

}  // namespace detail

/// Wilder's RSI. The first value (bar `period`) uses plain means of the first
/// `period` up/down moves; later averages follow
/// avg = (prev * (period - 1) + current) / period.
inline IndicatorSeries rsi(std::span<const double> closes, int period = 14) {
  if (period < 1) throw Error("indicators", "RSI period must be >= 1");
  const auto p = static_cast<std::size_t>(period);
  if (closes.size() < p + 1)
    throw Error("indicators", "insufficient history for RSI(" + std::to_string(period) + ")");
  IndicatorSeries out{IndicatorKind::RSI, period, p, {}};
  out.values.reserve(closes.size() - p);

  double gain = 0.0;
  double loss = 0.0;
  for (std::size_t i = 1; i <= p; ++i) {
    const double d = closes[i] - closes[i - 1];
    (d > 0 ? gain : loss) += d > 0 ? d : -d;
  }
  gain /= static_cast<double>(p);
  loss /= static_cast<double>(p);
  out.values.push_back(detail::rsi_from_averages(gain, loss));

  const double keep = static_cast<double>(p - 1);
  for (std::size_t i = p + 1; i < closes.size(); ++i) {
    const double d = closes[i] - closes[i - 1];
    gain = (gain * keep + (d > 0 ? d : 0.0)) / static_cast<double>(p);
    loss = (loss * keep + (d < 0 ? -d : 0.0)) / static_cast<double>(p);
    out.values.push_back(detail::rsi_from_averages(gain, loss));
  }
  return out;
}

}  // namespace fxsig
