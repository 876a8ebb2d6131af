#pragma once

// End-to-end orchestration: news + prices -> per-document sentiment ->
// windowed fusion with SMA/RSI -> backtest, plus classification metrics when
// the news carries gold labels. Every stage is deterministic.

#include <filesystem>
#include <fstream>
#include <istream>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "fxsig/backtest.hpp"
#include "fxsig/common.hpp"
#include "fxsig/indicators.hpp"
#include "fxsig/ingest.hpp"
#include "fxsig/lexicon.hpp"
#include "fxsig/metrics.hpp"
#include "fxsig/nbayes.hpp"
#include "fxsig/preprocess.hpp"
#include "fxsig/signals.hpp"

#ifndef FXSIG_DATA_DIR
#define FXSIG_DATA_DIR "data"
#endif

namespace fxsig {

inline std::string default_lexicon_path() { return std::string(FXSIG_DATA_DIR) + "/lexicon.tsv"; }
inline std::string default_stopwords_path() { return std::string(FXSIG_DATA_DIR) + "/stopwords_en.txt"; }

struct PipelineConfig {
  std::string news_path;
  std::string prices_path;
  std::string lexicon_path = default_lexicon_path();
  std::string stopwords_path = default_stopwords_path();
  std::string model_path;       // nbayes: load from here when set
  std::string train_news_path;  // nbayes without a model: labeled training corpus
  std::string out_dir = "out";
  std::string pair;  // defaults to the prices file stem when empty
  Timeframe timeframe = Timeframe::H4;
  Engine engine = Engine::lexicon;
  int sma_period = 50;
  int rsi_period = 14;
  FusionConfig fusion;
  BacktestConfig backtest;
  LexiconConfig lexicon;
  NBConfig nb;

  void validate() const {
    if (sma_period < 1 || rsi_period < 1) throw Error("cli", "indicator periods must be >= 1");
    fusion.validate();
    backtest.validate();
    lexicon.validate();
    nb.validate();
  }
};

/// Flat `key = value` lines; '#' starts a comment. Keys keep file order.
inline std::vector<std::pair<std::string, std::string>> read_config(std::istream& in,
                                                                    const std::string& origin) {
  std::vector<std::pair<std::string, std::string>> out;
  std::string line;
  std::size_t n = 0;
  while (std::getline(in, line)) {
    ++n;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    if (trim(line).empty()) continue;
    const auto eq = line.find('=');
    const std::string key(trim(std::string_view(line).substr(0, eq == std::string::npos ? 0 : eq)));
    if (eq == std::string::npos || key.empty())
      throw ParseError("cli", n, "", origin + ":" + std::to_string(n) + ": expected key = value");
    out.emplace_back(key, std::string(trim(std::string_view(line).substr(eq + 1))));
  }
  return out;
}

namespace detail {

inline std::ifstream open_input(const std::string& path, std::string_view module, std::string_view what) {
  if (path.empty()) throw Error(std::string(module), std::string(what) + " path not set");
  if (!std::filesystem::is_regular_file(path))
    throw Error(std::string(module), std::string(what) + " not found: " + path);
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(std::string(module), "cannot open " + std::string(what) + " " + path);
  return in;
}

template <class F>
auto with_file(const std::string& path, F&& f) -> decltype(f()) {
  try {
    return f();
  } catch (const ParseError& e) {
    throw ParseError(e.module(), e.row(), e.field(),
                     path + ": " + std::string(std::string_view(e.what()).substr(e.module().size() + 2)));
  } catch (const Error& e) {
    throw Error(e.module(), path + ": " + std::string(std::string_view(e.what()).substr(e.module().size() + 2)));
  }
}

}  // namespace detail

inline std::vector<NewsRecord> load_news(const std::string& path) {
  auto in = detail::open_input(path, "ingest", "news file");
  return detail::with_file(path, [&] { return parse_news_csv(in); });
}

inline PriceSeries load_prices(const std::string& path, std::string_view pair, Timeframe tf) {
  auto in = detail::open_input(path, "ingest", "price file");
  return detail::with_file(path, [&] { return parse_ohlc_csv(in, pair, tf); });
}

inline Lexicon load_lexicon_checked(const std::string& path) {
  auto in = detail::open_input(path, "lexicon", "lexicon file");
  return detail::with_file(path, [&] { return load_lexicon(in, path); });
}

inline StopWords load_stopwords_checked(const std::string& path) {
  auto in = detail::open_input(path, "preprocess", "stop-word file");
  return load_stopwords(in);
}

inline NBModel load_model_checked(const std::string& path) {
  auto in = detail::open_input(path, "nbayes", "model file");
  return detail::with_file(path, [&] { return load_model(in); });
}

/// The active sentiment engine with whatever it needs loaded.
struct SentimentEngine {
  Engine kind = Engine::lexicon;
  StopWords stopwords;
  std::optional<Lexicon> lexicon;
  LexiconConfig lexicon_config;
  std::optional<NBModel> model;
};

struct DocScore {
  Prediction prediction;                // nullopt when the classifier abstained
  std::optional<SentimentScore> score;  // absent for abstained nbayes documents
};

inline DocScore score_document(const SentimentEngine& engine, std::string_view text) {
  const ProcessedDoc doc = preprocess(text, engine.stopwords);
  if (engine.kind == Engine::lexicon) {
    const auto s = polarity_score(doc, *engine.lexicon, engine.lexicon_config);
    return {classify_polarity(s, engine.lexicon_config), s};
  }
  const auto post = posterior(*engine.model, featurize(doc, engine.model->vocabulary));
  const auto label = decide(post, engine.model->config.rejection_threshold);
  if (!label) return {std::nullopt, std::nullopt};
  return {label, nb_sentiment_score(post)};
}

inline std::vector<DocScore> score_documents(const SentimentEngine& engine,
                                             std::span<const NewsRecord> records) {
  std::vector<DocScore> out;
  out.reserve(records.size());
  for (const auto& r : records) out.push_back(score_document(engine, r.text));
  return out;
}

/// Accepted documents as window inputs; abstentions are dropped.
inline std::vector<ScoredDoc> to_scored_docs(std::span<const NewsRecord> records,
                                             std::span<const DocScore> scores) {
  std::vector<ScoredDoc> out;
  for (std::size_t i = 0; i < records.size(); ++i)
    if (scores[i].score)
      out.push_back({records[i].timestamp, records[i].pair, *scores[i].score, records[i].relevance_weight});
  return out;
}

inline std::vector<LabeledDoc> labeled_docs(std::span<const NewsRecord> records, const StopWords& stopwords) {
  std::vector<LabeledDoc> out;
  for (std::size_t i = 0; i < records.size(); ++i)
    if (records[i].label) out.push_back({preprocess(records[i].text, stopwords, i), *records[i].label});
  return out;
}

/// Metrics over the labeled records; nullopt when none carry a label.
inline std::optional<MetricsReport> evaluate_scores(std::span<const NewsRecord> records,
                                                    std::span<const DocScore> scores) {
  std::vector<Prediction> preds;
  std::vector<ClassLabel> golds;
  for (std::size_t i = 0; i < records.size(); ++i) {
    if (!records[i].label) continue;
    preds.push_back(scores[i].prediction);
    golds.push_back(*records[i].label);
  }
  if (golds.empty()) return std::nullopt;
  const auto m = confusion(preds, golds);
  if (m.total() == 0) throw Error("metrics", "every labeled document was rejected");
  return compute_metrics(m);
}

inline void write_scores_csv(std::ostream& out, std::span<const NewsRecord> records,
                             std::span<const DocScore> scores, Engine engine) {
  out << "timestamp,pair,weight,engine,score,prediction\n";
  for (std::size_t i = 0; i < records.size(); ++i) {
    const auto& s = scores[i];
    out << format_iso8601(records[i].timestamp) << ',' << records[i].pair << ','
        << format_shortest(records[i].relevance_weight) << ',' << to_string(engine) << ','
        << (s.score ? format_fixed(s.score->value(), 6) : std::string{}) << ','
        << (s.prediction ? to_string(*s.prediction) : std::string_view{"rejected"}) << '\n';
  }
}

/// "EURUSD_H4.csv" -> "EURUSD": a trailing timeframe tag after '_' is dropped.
inline std::string pair_from_path(const std::string& path) {
  std::string stem = std::filesystem::path(path).stem().string();
  if (const auto us = stem.rfind('_'); us != std::string::npos && parse_timeframe(stem.substr(us + 1)))
    stem.erase(us);
  return normalize_pair(stem);
}

struct PipelineResult {
  std::vector<SignalRow> signals;
  BacktestReport backtest;
  std::optional<MetricsReport> metrics;
  std::optional<NBModel> trained_model;
  std::vector<std::filesystem::path> artifacts;
};

/// Loads the engine named by `config`, training a model when nbayes has none.
inline SentimentEngine make_engine(const PipelineConfig& config, std::span<const NewsRecord> fallback_training,
                                   std::optional<NBModel>* trained = nullptr) {
  SentimentEngine e;
  e.kind = config.engine;
  e.stopwords = load_stopwords_checked(config.stopwords_path);
  e.lexicon_config = config.lexicon;
  if (config.engine == Engine::lexicon) {
    e.lexicon = load_lexicon_checked(config.lexicon_path);
  } else if (!config.model_path.empty()) {
    e.model = load_model_checked(config.model_path);
  } else {
    std::vector<NewsRecord> extra;
    std::span<const NewsRecord> training = fallback_training;
    if (!config.train_news_path.empty()) {
      extra = load_news(config.train_news_path);
      training = extra;
    }
    const auto labeled = labeled_docs(training, e.stopwords);
    if (labeled.empty()) throw Error("nbayes", "no model file and no labeled training documents");
    e.model = train(labeled, config.nb);
    if (trained) *trained = e.model;
  }
  return e;
}

inline void write_text_file(const std::filesystem::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cli", "cannot write " + path.string());
  out << content;
  if (!out) throw Error("cli", "write failed for " + path.string());
}

inline PipelineResult run_pipeline(const PipelineConfig& config) {
  config.validate();
  const std::string pair = config.pair.empty() ? pair_from_path(config.prices_path) : normalize_pair(config.pair);

  const auto news = load_news(config.news_path);
  const auto series = load_prices(config.prices_path, pair, config.timeframe);

  PipelineResult res;
  const SentimentEngine engine = make_engine(config, news, &res.trained_model);
  const auto scores = score_documents(engine, news);
  res.metrics = evaluate_scores(news, scores);

  const auto docs = to_scored_docs(news, scores);
  const auto contexts = build_contexts(series, docs, config.sma_period, config.rsi_period, config.fusion);
  res.signals = generate_signals(contexts, config.fusion);
  const auto timed = timed_signals(res.signals);
  res.backtest = run_backtest(series, timed, config.backtest);

  namespace fs = std::filesystem;
  const fs::path dir(config.out_dir);
  fs::create_directories(dir);
  auto emit = [&](const char* name, const std::string& content) {
    write_text_file(dir / name, content);
    res.artifacts.push_back(dir / name);
  };
  std::ostringstream s;
  write_signals_csv(s, res.signals);
  emit("signals.csv", s.str());
  emit("backtest.json", to_json(res.backtest).dump(2) + "\n");
  s.str({});
  write_backtest_text(s, res.backtest);
  emit("backtest.txt", s.str());
  s.str({});
  write_equity_csv(s, res.backtest);
  emit("equity.csv", s.str());
  const std::string model_name = config.engine == Engine::lexicon ? "Lexicon-based" : "Naive Bayes";
  if (res.metrics) {
    emit("metrics.json", to_json(*res.metrics, model_name).dump(2) + "\n");
    s.str({});
    write_metrics_text(s, *res.metrics, model_name);
    emit("metrics.txt", s.str());
  }
  if (res.trained_model) {
    s.str({});
    save_model(s, *res.trained_model);
    emit("model.txt", s.str());
  }
  return res;
}

}  // namespace fxsig
