// fxsig command-line front end.
//
//   fxsig train     labeled news -> Naive Bayes model file
//   fxsig score     news -> per-document sentiment CSV
//   fxsig signals   news + prices -> signals CSV
//   fxsig backtest  prices + signals CSV -> report JSON / text / equity CSV
//   fxsig evaluate  labeled news -> accuracy / precision / recall / F1
//   fxsig pipeline  all of the above in one deterministic run
//
// Every subcommand accepts `--config FILE` with flat `key = value` lines;
// keys are the long flag names (dashes or underscores). Flags given on the
// command line win over the file.

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "fxsig/fxsig.hpp"

namespace {

using fxsig::PipelineConfig;

struct CliState {
  PipelineConfig cfg;
  std::string engine = "lexicon";
  std::string timeframe = "H4";
  double window_hours = 24.0;
  std::string out = "-";
  std::string model_out;
  std::string signals_path;
  std::string report_json;
  std::string report_text = "-";
  std::string equity_csv;
  std::string metrics_json;
  std::string metrics_text = "-";
  std::string config_file;
};

void add_config(CLI::App* sub, CliState& st) {
  sub->add_option("--config", st.config_file, "Flat key = value file; keys mirror the long flags");
}

void add_text_inputs(CLI::App* sub, CliState& st) {
  sub->add_option("--stopwords", st.cfg.stopwords_path, "Stop-word file (one word per line)")
      ->capture_default_str();
}

void add_engine(CLI::App* sub, CliState& st) {
  sub->add_option("--engine", st.engine, "Sentiment engine")
      ->check(CLI::IsMember({"lexicon", "nbayes"}))
      ->capture_default_str();
  sub->add_option("--lexicon", st.cfg.lexicon_path, "Lexicon file (token<TAB>valence)")
      ->capture_default_str();
  sub->add_option("--model", st.cfg.model_path, "Naive Bayes model file (engine nbayes)");
  sub->add_option("--train-news", st.cfg.train_news_path,
                  "Labeled news used to train a model when --model is not given");
  sub->add_option("--alpha", st.cfg.lexicon.alpha, "Lexicon normalization constant")->capture_default_str();
  sub->add_option("--lexicon-pos-threshold", st.cfg.lexicon.pos_threshold,
                  "Lexicon score at or above which a document is positive")
      ->capture_default_str();
  sub->add_option("--lexicon-neg-threshold", st.cfg.lexicon.neg_threshold,
                  "Lexicon score at or below which a document is negative")
      ->capture_default_str();
  sub->add_option("--rejection-threshold", st.cfg.nb.rejection_threshold,
                  "Naive Bayes: minimum winning posterior (when training)")
      ->capture_default_str();
  sub->add_option("--min-count", st.cfg.nb.min_count, "Naive Bayes: vocabulary frequency cutoff (when training)")
      ->capture_default_str();
  sub->add_option("--variance-floor-scale", st.cfg.nb.variance_floor_scale,
                  "Naive Bayes: variance floor relative to the largest feature variance (when training)")
      ->capture_default_str();
}

void add_prices(CLI::App* sub, CliState& st, bool required) {
  auto* o = sub->add_option("--prices", st.cfg.prices_path, "OHLC price CSV");
  if (required) o->required();
  sub->add_option("--pair", st.cfg.pair, "Currency pair (default: prices file name)");
  sub->add_option("--timeframe", st.timeframe, "Bar timeframe")
      ->check(CLI::IsMember({"H4", "D1", "MN"}))
      ->capture_default_str();
}

void add_fusion(CLI::App* sub, CliState& st) {
  sub->add_option("--sma-period", st.cfg.sma_period, "Moving-average period (bars)")->capture_default_str();
  sub->add_option("--rsi-period", st.cfg.rsi_period, "RSI period (bars)")->capture_default_str();
  sub->add_option("--pos-threshold", st.cfg.fusion.pos_threshold, "Window sentiment needed for a buy")
      ->capture_default_str();
  sub->add_option("--neg-threshold", st.cfg.fusion.neg_threshold, "Window sentiment needed for a sell")
      ->capture_default_str();
  sub->add_option("--strong-threshold", st.cfg.fusion.strong_threshold, "|sentiment| for a strong signal")
      ->capture_default_str();
  sub->add_option("--window-hours", st.window_hours, "Sentiment lookback window before each bar close")
      ->capture_default_str();
  sub->add_option("--min-docs", st.cfg.fusion.min_docs, "Documents required in the window")
      ->capture_default_str();
}

void add_backtest(CLI::App* sub, CliState& st) {
  sub->add_option("--slippage", st.cfg.backtest.slippage_per_side, "Slippage per side, price units")
      ->capture_default_str();
  sub->add_option("--fee", st.cfg.backtest.fee_per_side, "Fee per side, fraction of price")
      ->capture_default_str();
  sub->add_option("--max-hold", st.cfg.backtest.max_hold_bars, "Forced exit after this many bars")
      ->capture_default_str();
}

// Applies the string-typed options to the typed config.
void finalize(CliState& st) {
  st.cfg.engine = *fxsig::parse_engine(st.engine);
  st.cfg.timeframe = *fxsig::parse_timeframe(st.timeframe);
  if (!(st.window_hours > 0.0)) throw fxsig::Error("cli", "--window-hours must be > 0");
  st.cfg.fusion.sentiment_window =
      std::chrono::seconds{static_cast<long long>(std::llround(st.window_hours * 3600.0))};
  st.cfg.validate();
}

// Writes to a path, or stdout for "-".
void emit(const std::string& path, const std::string& content) {
  if (path.empty()) return;
  if (path == "-") {
    std::cout << content;
    return;
  }
  fxsig::write_text_file(path, content);
}

std::string pair_for(const CliState& st) {
  return st.cfg.pair.empty() ? fxsig::pair_from_path(st.cfg.prices_path) : fxsig::normalize_pair(st.cfg.pair);
}

int cmd_train(CliState& st) {
  const auto news = fxsig::load_news(st.cfg.news_path);
  const auto stop = fxsig::load_stopwords_checked(st.cfg.stopwords_path);
  const auto labeled = fxsig::labeled_docs(news, stop);
  if (labeled.empty()) throw fxsig::Error("nbayes", st.cfg.news_path + ": no labeled rows");
  const auto model = fxsig::train(labeled, st.cfg.nb);
  std::ostringstream s;
  fxsig::save_model(s, model);
  emit(st.model_out, s.str());
  std::cerr << "trained on " << labeled.size() << " documents, vocabulary " << model.vocabulary.size() << '\n';
  return 0;
}

int cmd_score(CliState& st) {
  const auto news = fxsig::load_news(st.cfg.news_path);
  const auto engine = fxsig::make_engine(st.cfg, news);
  const auto scores = fxsig::score_documents(engine, news);
  std::ostringstream s;
  fxsig::write_scores_csv(s, news, scores, st.cfg.engine);
  emit(st.out, s.str());
  return 0;
}

int cmd_signals(CliState& st) {
  const auto news = fxsig::load_news(st.cfg.news_path);
  const auto series = fxsig::load_prices(st.cfg.prices_path, pair_for(st), st.cfg.timeframe);
  const auto engine = fxsig::make_engine(st.cfg, news);
  const auto scores = fxsig::score_documents(engine, news);
  const auto docs = fxsig::to_scored_docs(news, scores);
  const auto ctx = fxsig::build_contexts(series, docs, st.cfg.sma_period, st.cfg.rsi_period, st.cfg.fusion);
  const auto rows = fxsig::generate_signals(ctx, st.cfg.fusion);
  std::ostringstream s;
  fxsig::write_signals_csv(s, rows);
  emit(st.out, s.str());
  return 0;
}

int cmd_backtest(CliState& st) {
  const auto series = fxsig::load_prices(st.cfg.prices_path, pair_for(st), st.cfg.timeframe);
  auto in = fxsig::detail::open_input(st.signals_path, "signals", "signals file");
  const auto signals = fxsig::detail::with_file(st.signals_path, [&] { return fxsig::read_signals_csv(in); });
  const auto rep = fxsig::run_backtest(series, signals, st.cfg.backtest);
  emit(st.report_json, fxsig::to_json(rep).dump(2) + "\n");
  std::ostringstream s;
  fxsig::write_backtest_text(s, rep);
  emit(st.report_text, s.str());
  if (!st.equity_csv.empty()) {
    s.str({});
    fxsig::write_equity_csv(s, rep);
    emit(st.equity_csv, s.str());
  }
  return 0;
}

int cmd_evaluate(CliState& st) {
  const auto news = fxsig::load_news(st.cfg.news_path);
  const auto engine = fxsig::make_engine(st.cfg, news);
  const auto scores = fxsig::score_documents(engine, news);
  const auto report = fxsig::evaluate_scores(news, scores);
  if (!report) throw fxsig::Error("metrics", st.cfg.news_path + ": no labeled rows to evaluate");
  const std::string name = st.cfg.engine == fxsig::Engine::lexicon ? "Lexicon-based" : "Naive Bayes";
  emit(st.metrics_json, fxsig::to_json(*report, name).dump(2) + "\n");
  std::ostringstream s;
  fxsig::write_metrics_text(s, *report, name);
  emit(st.metrics_text, s.str());
  return 0;
}

int cmd_pipeline(CliState& st) {
  const auto res = fxsig::run_pipeline(st.cfg);
  for (const auto& p : res.artifacts) std::cerr << "wrote " << p.string() << '\n';
  return 0;
}

// Expands `--config FILE` into `--key=value` arguments placed right after the
// subcommand, so explicit flags (parsed later, last one wins) override them.
std::vector<std::string> expand_config(CLI::App& app, const std::vector<std::string>& args) {
  std::string path;
  for (std::size_t i = 1; i < args.size(); ++i) {
    if (args[i] == "--config" && i + 1 < args.size()) path = args[i + 1];
    else if (args[i].rfind("--config=", 0) == 0) path = args[i].substr(9);
  }
  if (path.empty() || args.size() < 2) return args;
  CLI::App* sub = nullptr;
  for (auto* s : app.get_subcommands({})) {
    if (s->get_name() == args[1]) sub = s;
  }
  if (sub == nullptr) return args;

  std::ifstream in(path);
  if (!in) throw fxsig::Error("cli", "config file not found: " + path);
  std::vector<std::string> out{args[0], args[1]};
  for (auto [key, value] : fxsig::read_config(in, path)) {
    for (char& c : key)
      if (c == '_') c = '-';
    if (key == "config" || sub->get_option_no_throw("--" + key) == nullptr)
      throw fxsig::Error("cli", path + ": unknown key '" + key + "' for " + args[1]);
    out.push_back("--" + key + "=" + value);
  }
  out.insert(out.end(), args.begin() + 2, args.end());
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Sentiment-driven Forex signal generation and backtesting"};
  app.require_subcommand(1);
  app.option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
  CliState st;

  auto* train = app.add_subcommand("train", "Train a Naive Bayes model from labeled news");
  add_config(train, st);
  train->add_option("--news", st.cfg.news_path, "Labeled news CSV")->required();
  add_text_inputs(train, st);
  train->add_option("--model-out", st.model_out, "Model file to write ('-' for stdout)")->required();
  train->add_option("--min-count", st.cfg.nb.min_count, "Vocabulary frequency cutoff")->capture_default_str();
  train->add_option("--variance-floor-scale", st.cfg.nb.variance_floor_scale,
                    "Variance floor relative to the largest feature variance")
      ->capture_default_str();
  train->add_option("--rejection-threshold", st.cfg.nb.rejection_threshold, "Minimum winning posterior")
      ->capture_default_str();

  auto* score = app.add_subcommand("score", "Score each news document");
  add_config(score, st);
  score->add_option("--news", st.cfg.news_path, "News CSV")->required();
  add_text_inputs(score, st);
  add_engine(score, st);
  score->add_option("--out", st.out, "Output CSV ('-' for stdout)")->capture_default_str();

  auto* signals = app.add_subcommand("signals", "Generate fused trading signals per bar");
  add_config(signals, st);
  signals->add_option("--news", st.cfg.news_path, "News CSV")->required();
  add_text_inputs(signals, st);
  add_engine(signals, st);
  add_prices(signals, st, true);
  add_fusion(signals, st);
  signals->add_option("--out", st.out, "Signals CSV ('-' for stdout)")->capture_default_str();

  auto* backtest = app.add_subcommand("backtest", "Replay a signals CSV against prices");
  add_config(backtest, st);
  add_prices(backtest, st, true);
  backtest->add_option("--signals", st.signals_path, "Signals CSV")->required();
  add_backtest(backtest, st);
  backtest->add_option("--report-json", st.report_json, "JSON report path ('-' for stdout)");
  backtest->add_option("--report-text", st.report_text, "Text summary path ('-' for stdout)")
      ->capture_default_str();
  backtest->add_option("--equity-csv", st.equity_csv, "Equity curve CSV path");

  auto* evaluate = app.add_subcommand("evaluate", "Classification metrics on labeled news");
  add_config(evaluate, st);
  evaluate->add_option("--news", st.cfg.news_path, "Labeled news CSV")->required();
  add_text_inputs(evaluate, st);
  add_engine(evaluate, st);
  evaluate->add_option("--json", st.metrics_json, "Metrics JSON path ('-' for stdout)");
  evaluate->add_option("--text", st.metrics_text, "Metrics table path ('-' for stdout)")->capture_default_str();

  auto* pipeline = app.add_subcommand("pipeline", "Run every stage and write all artifacts");
  add_config(pipeline, st);
  pipeline->add_option("--news", st.cfg.news_path, "News CSV")->required();
  add_text_inputs(pipeline, st);
  add_engine(pipeline, st);
  add_prices(pipeline, st, true);
  add_fusion(pipeline, st);
  add_backtest(pipeline, st);
  pipeline->add_option("--out-dir", st.cfg.out_dir, "Directory for artifacts")->capture_default_str();

  try {
    std::vector<std::string> args(argv, argv + argc);
    args = expand_config(app, args);
    std::vector<const char*> cargs;
    for (const auto& a : args) cargs.push_back(a.c_str());
    try {
      app.parse(static_cast<int>(cargs.size()), cargs.data());
    } catch (const CLI::ParseError& e) {
      return app.exit(e);
    }
    finalize(st);
    if (*train) return cmd_train(st);
    if (*score) return cmd_score(st);
    if (*signals) return cmd_signals(st);
    if (*backtest) return cmd_backtest(st);
    if (*evaluate) return cmd_evaluate(st);
    if (*pipeline) return cmd_pipeline(st);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 2;
}
