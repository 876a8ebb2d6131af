#pragma once

// Seeded synthetic market: H4 bars following alternating drift regimes,
// with news whose tone announces each regime a few bars before it starts.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "fxsig/backtest.hpp"
#include "fxsig/ingest.hpp"
#include "fxsig/signals.hpp"

namespace synth {

struct WorldOptions {
  std::string pair = "EURUSD";
  std::size_t bars = 720;  // 120 days of H4 bars
  double start_price = 1.08;
  double drift = 0.0006;  // per bar, in the regime's direction
  double noise = 0.0012;  // per-bar close-to-close sd
  std::size_t min_regime = 60;
  std::size_t max_regime = 120;
  std::size_t news_lead_bars = 6;
  double news_prob = 0.8;     // chance a bar carries regime news
  double neutral_prob = 0.15;  // chance a document is neutral filler
};

struct World {
  fxsig::PriceSeries series;
  std::vector<fxsig::NewsRecord> news;
  std::vector<int> regime;  // +1 / -1 per bar
};

inline const std::vector<std::string>& positive_bank() {
  static const std::vector<std::string> bank{
      "Dollar strength grows as robust growth boosts investor confidence",
      "Analysts optimistic after strong data and solid gains",
      "Central bank signals confidence, markets see positive momentum",
      "@fxdesk strong buying, optimism returns #forex https://t.co/abc",
      "Upbeat outlook: exports improve and the recovery strengthens",
      "Investors confident as growth figures beat forecasts",
  };
  return bank;
}

inline const std::vector<std::string>& negative_bank() {
  static const std::vector<std::string> bank{
      "Recession fears grow as weak data deepens worries",
      "Markets in turmoil: panic selling and heavy losses",
      "Crisis concerns weigh, analysts warn of weakness and risk",
      "@fxdesk weak session, fear dominates #forex https://t.co/xyz",
      "Pessimism spreads after the failure of trade talks",
      "Traders worry as losses mount and confidence falls apart",
  };
  return bank;
}

inline const std::vector<std::string>& neutral_bank() {
  static const std::vector<std::string> bank{
      "Central bank meeting scheduled for Thursday",
      "Traders await the monthly employment report",
      "Quarterly statistics released this morning, details to follow",
      "Finance ministers gather in Brussels this week",
  };
  return bank;
}

inline World make_world(std::uint64_t seed, const WorldOptions& o = {}) {
  using namespace std::chrono;
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::normal_distribution<double> gauss(0.0, 1.0);

  World w;
  w.series.pair = fxsig::normalize_pair(o.pair);
  w.series.timeframe = fxsig::Timeframe::H4;

  const std::size_t horizon = o.bars + o.news_lead_bars;
  w.regime.reserve(horizon);
  int dir = unit(rng) < 0.5 ? 1 : -1;
  while (w.regime.size() < horizon) {
    const auto len = o.min_regime + static_cast<std::size_t>(unit(rng) * static_cast<double>(o.max_regime - o.min_regime + 1));
    for (std::size_t k = 0; k < len && w.regime.size() < horizon; ++k) w.regime.push_back(dir);
    dir = -dir;
  }

  const fxsig::Timestamp start = sys_days{year{2023} / April / 1} + hours{4};
  auto quote = [](double v) { return std::round(v * 1e5) / 1e5; };
  double prev_close = o.start_price;
  for (std::size_t i = 0; i < o.bars; ++i) {
    fxsig::Candle c;
    c.date = start + hours{4 * static_cast<long>(i)};
    c.open = prev_close;
    c.close = quote(prev_close + o.drift * w.regime[i] + o.noise * gauss(rng));
    c.high = quote(std::max(c.open, c.close) + 0.0004 * std::abs(gauss(rng)));
    c.low = quote(std::min(c.open, c.close) - 0.0004 * std::abs(gauss(rng)));
    c.volume = 20000 + static_cast<std::int64_t>(unit(rng) * 40000.0);
    w.series.bars.push_back(c);
    prev_close = c.close;
  }

  static constexpr double kWeights[] = {0.5, 1.0, 2.0};
  for (std::size_t i = 0; i < o.bars; ++i) {
    if (unit(rng) >= o.news_prob) continue;
    const int tone = w.regime[i + o.news_lead_bars];
    const int docs = 1 + (unit(rng) < 0.5 ? 1 : 0);
    for (int d = 0; d < docs; ++d) {
      fxsig::NewsRecord r;
      const auto bar_close = w.series.bars[i].date;
      r.timestamp = bar_close - seconds{1 + static_cast<long>(unit(rng) * (4 * 3600 - 2))};
      r.source = unit(rng) < 0.5 ? "newswire" : "social";
      r.pair = w.series.pair;
      r.relevance_weight = kWeights[static_cast<std::size_t>(unit(rng) * 3.0) % 3];
      const bool neutral = unit(rng) < o.neutral_prob;
      const auto& bank = neutral ? neutral_bank() : (tone > 0 ? positive_bank() : negative_bank());
      r.text = bank[static_cast<std::size_t>(unit(rng) * static_cast<double>(bank.size())) % bank.size()];
      r.label = neutral ? fxsig::ClassLabel::neutral
                        : (tone > 0 ? fxsig::ClassLabel::positive : fxsig::ClassLabel::negative);
      w.news.push_back(std::move(r));
    }
  }
  std::stable_sort(w.news.begin(), w.news.end(),
                   [](const auto& a, const auto& b) { return a.timestamp < b.timestamp; });
  return w;
}

/// Random Buy/Sell signals on `count` distinct bars among `eligible`.
inline std::vector<fxsig::TimedSignal> random_signals(std::uint64_t seed,
                                                      const std::vector<fxsig::Timestamp>& eligible,
                                                      std::size_t count) {
  std::mt19937_64 rng(seed);
  std::vector<fxsig::Timestamp> picks = eligible;
  std::shuffle(picks.begin(), picks.end(), rng);
  picks.resize(std::min(count, picks.size()));
  std::sort(picks.begin(), picks.end());
  std::vector<fxsig::TimedSignal> out;
  for (auto t : picks) {
    fxsig::TimedSignal s;
    s.timestamp = t;
    s.signal.direction = (rng() & 1U) ? fxsig::Direction::Buy : fxsig::Direction::Sell;
    s.signal.strength = fxsig::Strength::Normal;
    out.push_back(s);
  }
  return out;
}

}  // namespace synth
