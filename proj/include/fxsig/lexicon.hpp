#pragma once

// Valence-lexicon sentiment: per-document normalized polarity and the
// relevance-weighted aggregate over a set of documents.

#include <algorithm>
#include <cmath>
#include <fstream>
#include <istream>
#include <limits>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "fxsig/common.hpp"
#include "fxsig/preprocess.hpp"

namespace fxsig {

struct LexiconConfig {
  double alpha = 15.0;  // normalization constant
  double pos_threshold = 0.05;
  double neg_threshold = -0.05;

  void validate() const {
    if (!(alpha > 0.0) || !std::isfinite(alpha)) throw Error("lexicon", "alpha must be > 0");
    if (!(neg_threshold < 0.0 && 0.0 < pos_threshold))
      throw Error("lexicon", "thresholds must satisfy neg < 0 < pos");
  }
};

/// A sentiment value in the open interval (-1, +1), tagged with its engine.
class SentimentScore {
 public:
  SentimentScore(double value, Engine engine) : value_(value), engine_(engine) {
    if (!(value > -1.0 && value < 1.0))
      throw Error("lexicon", "sentiment score " + format_shortest(value) + " outside (-1, 1)");
  }

  double value() const noexcept { return value_; }
  Engine engine() const noexcept { return engine_; }

 private:
  double value_;
  Engine engine_;
};

/// Pulls a value that rounded onto +-1 back into the open interval.
inline double clamp_open_unit(double v) noexcept {
  constexpr double kEdge = 1.0 - std::numeric_limits<double>::epsilon() / 2;  // nextafter(1, 0)
  return std::clamp(v, -kEdge, kEdge);
}

class Lexicon {
 public:
  Lexicon() = default;

  /// Throws on an empty/uppercase token, a non-finite valence or a duplicate.
  void add(std::string token, double valence) {
    if (token.empty()) throw Error("lexicon", "empty token");
    for (char c : token)
      if (c >= 'A' && c <= 'Z') throw Error("lexicon", "token '" + token + "' is not lowercase");
    if (!std::isfinite(valence)) throw Error("lexicon", "non-finite valence for '" + token + "'");
    auto [it, inserted] = entries_.emplace(std::move(token), valence);
    if (!inserted) throw Error("lexicon", "duplicate token '" + it->first + "'");
  }

  /// Valence of `token`, or 0 when it is not in the lexicon.
  double valence(std::string_view token) const {
    const auto it = entries_.find(token);
    return it == entries_.end() ? 0.0 : it->second;
  }
  bool contains(std::string_view token) const { return entries_.find(token) != entries_.end(); }
  std::size_t size() const noexcept { return entries_.size(); }

 private:
  std::map<std::string, double, std::less<>> entries_;
};

/// `token<TAB>valence` per line, '#' comments allowed.
inline Lexicon load_lexicon(std::istream& in, const std::string& origin = "<stream>") {
  Lexicon lex;
  std::string line;
  std::size_t n = 0;
  while (std::getline(in, line)) {
    ++n;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (trim(line).empty() || trim(line).front() == '#') continue;
    const auto tab = line.find('\t');
    const auto where = origin + ":" + std::to_string(n);
    if (tab == std::string::npos) throw ParseError("lexicon", n, "", "missing tab at " + where);
    std::string_view rest = std::string_view(line).substr(tab + 1);
    if (const auto tab2 = rest.find('\t'); tab2 != std::string_view::npos) rest = rest.substr(0, tab2);
    const auto v = parse_double(trim(rest));
    if (!v) throw ParseError("lexicon", n, "valence", "unparseable valence at " + where);
    try {
      lex.add(std::string(trim(std::string_view(line).substr(0, tab))), *v);
    } catch (const Error& e) {
      throw ParseError("lexicon", n, "token", std::string(e.what()) + " at " + where);
    }
  }
  return lex;
}

inline Lexicon load_lexicon_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("lexicon", "cannot open lexicon file " + path);
  return load_lexicon(in, path);
}

/// s / sqrt(s^2 + alpha) where s is the summed valence of the document's
/// tokens (out-of-lexicon tokens contribute 0).
inline SentimentScore polarity_score(const ProcessedDoc& doc, const Lexicon& lexicon,
                                     const LexiconConfig& config = {}) {
  double sum = 0.0;
  for (const auto& t : doc.tokens) sum += lexicon.valence(t);
  if (sum == 0.0) return {0.0, Engine::lexicon};
  const double value = sum / std::hypot(sum, std::sqrt(config.alpha));
  return {clamp_open_unit(value), Engine::lexicon};
}

inline ClassLabel classify_polarity(const SentimentScore& score, const LexiconConfig& config = {}) {
  if (score.value() >= config.pos_threshold) return ClassLabel::positive;
  if (score.value() <= config.neg_threshold) return ClassLabel::negative;
  return ClassLabel::neutral;
}

struct WeightedScore {
  SentimentScore score;
  double weight;
};

/// Relevance-weighted mean: sum(value * weight) / sum(weight).
inline SentimentScore aggregate_sentiment(std::span<const WeightedScore> scored) {
  if (scored.empty()) throw Error("lexicon", "no documents in window");
  const Engine engine = scored.front().score.engine();
  double num = 0.0;
  double den = 0.0;
  double lo = 1.0;
  double hi = -1.0;
  for (const auto& s : scored) {
    if (!(s.weight > 0.0) || !std::isfinite(s.weight))
      throw Error("lexicon", "nonpositive weight in aggregation");
    if (s.score.engine() != engine) throw Error("lexicon", "mixed engine tags in aggregation");
    num += s.score.value() * s.weight;
    den += s.weight;
    lo = std::min(lo, s.score.value());
    hi = std::max(hi, s.score.value());
  }
  return {std::clamp(num / den, lo, hi), engine};
}

}  // namespace fxsig
