#pragma once

// Gaussian Naive Bayes sentiment classifier over relative term frequencies,
// with a rejection threshold on the winning posterior.
//
// Each class y gets a prior P(y) and, per vocabulary token i, a Gaussian
// N(mu_{y,i}, var_{y,i}) for the token's relative frequency x_i. Posteriors
// are evaluated in log space and normalized with a max shift, so they stay
// finite even when every class-conditional density underflows.

#include <algorithm>
#include <array>
#include <cmath>
#include <fstream>
#include <istream>
#include <map>
#include <optional>
#include <ostream>
#include <span>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "fxsig/common.hpp"
#include "fxsig/lexicon.hpp"
#include "fxsig/preprocess.hpp"

namespace fxsig {

struct NBConfig {
  int min_count = 2;
  double variance_floor_scale = 1e-9;  // times the largest pooled feature variance
  double rejection_threshold = 0.5;

  void validate() const {
    if (min_count < 1) throw Error("nbayes", "min_count must be >= 1");
    if (!(variance_floor_scale > 0.0) || !std::isfinite(variance_floor_scale))
      throw Error("nbayes", "variance_floor_scale must be > 0");
    if (!(rejection_threshold >= 0.0 && rejection_threshold < 1.0))
      throw Error("nbayes", "rejection_threshold must lie in [0, 1)");
  }
};

/// Token -> dense index, lexicographic order.
class Vocabulary {
 public:
  Vocabulary() = default;
  Vocabulary(std::vector<std::string> tokens, int min_count) : tokens_(std::move(tokens)), min_count_(min_count) {
    std::sort(tokens_.begin(), tokens_.end());
    tokens_.erase(std::unique(tokens_.begin(), tokens_.end()), tokens_.end());
    for (std::size_t i = 0; i < tokens_.size(); ++i) index_.emplace(tokens_[i], i);
  }

  std::optional<std::size_t> index_of(std::string_view token) const {
    const auto it = index_.find(token);
    if (it == index_.end()) return std::nullopt;
    return it->second;
  }
  std::size_t size() const noexcept { return tokens_.size(); }
  const std::vector<std::string>& tokens() const noexcept { return tokens_; }
  int min_count() const noexcept { return min_count_; }

 private:
  std::vector<std::string> tokens_;
  std::map<std::string, std::size_t, std::less<>> index_;
  int min_count_ = 1;
};

using FeatureVector = std::vector<double>;

/// Tokens whose total corpus frequency reaches `min_count`.
inline Vocabulary build_vocabulary(std::span<const ProcessedDoc> corpus, int min_count) {
  if (corpus.empty()) throw Error("nbayes", "cannot build a vocabulary from an empty corpus");
  std::map<std::string, int, std::less<>> counts;
  for (const auto& doc : corpus)
    for (const auto& t : doc.tokens) ++counts[t];
  std::vector<std::string> kept;
  for (const auto& [tok, n] : counts)
    if (n >= min_count) kept.push_back(tok);
  if (kept.empty())
    throw Error("nbayes", "vocabulary is empty after min_count " + std::to_string(min_count));
  return Vocabulary(std::move(kept), min_count);
}

/// x_i = count(token_i) / max(1, token count of the document). Unknown
/// tokens still count toward the document length.
inline FeatureVector featurize(const ProcessedDoc& doc, const Vocabulary& vocab) {
  FeatureVector x(vocab.size(), 0.0);
  for (const auto& t : doc.tokens)
    if (const auto i = vocab.index_of(t)) x[*i] += 1.0;
  const double len = static_cast<double>(std::max<std::size_t>(1, doc.tokens.size()));
  for (double& v : x) v /= len;
  return x;
}

struct GaussianParams {
  std::array<std::vector<double>, 3> mean;      // indexed by ClassLabel
  std::array<std::vector<double>, 3> variance;  // each >= the model's floor
};

struct NBModel {
  Vocabulary vocabulary;
  std::array<double, 3> priors{};  // indexed by ClassLabel
  GaussianParams params;
  NBConfig config;
  double variance_floor = 0.0;
};

struct LabeledDoc {
  ProcessedDoc doc;
  ClassLabel label;
};

/// Fits priors and per-class Gaussians to precomputed feature vectors.
/// Variances are maximum-likelihood (divide by n) and clamped up to
/// variance_floor_scale * max pooled feature variance (1.0 when all pooled
/// variances are zero).
inline NBModel train_features(Vocabulary vocab, std::span<const FeatureVector> xs,
                              std::span<const ClassLabel> labels, const NBConfig& config = {}) {
  config.validate();
  if (xs.size() != labels.size()) throw Error("nbayes", "features/labels length mismatch");
  const std::size_t n = vocab.size();
  for (const auto& x : xs)
    if (x.size() != n) throw Error("nbayes", "feature dimension mismatch in training data");

  std::array<std::size_t, 3> count{};
  for (auto y : labels) ++count[index_of(y)];
  for (auto y : kAllLabels)
    if (count[index_of(y)] == 0)
      throw Error("nbayes", "training data has no documents of class " + std::string(to_string(y)));

  NBModel m;
  m.vocabulary = std::move(vocab);
  m.config = config;
  const double total = static_cast<double>(xs.size());
  for (auto y : kAllLabels) {
    const std::size_t c = index_of(y);
    m.priors[c] = static_cast<double>(count[c]) / total;
    m.params.mean[c].assign(n, 0.0);
    m.params.variance[c].assign(n, 0.0);
  }

  for (std::size_t d = 0; d < xs.size(); ++d) {
    auto& mu = m.params.mean[index_of(labels[d])];
    for (std::size_t i = 0; i < n; ++i) mu[i] += xs[d][i];
  }
  for (auto y : kAllLabels)
    for (double& v : m.params.mean[index_of(y)]) v /= static_cast<double>(count[index_of(y)]);
  for (std::size_t d = 0; d < xs.size(); ++d) {
    const std::size_t c = index_of(labels[d]);
    for (std::size_t i = 0; i < n; ++i) {
      const double dev = xs[d][i] - m.params.mean[c][i];
      m.params.variance[c][i] += dev * dev;
    }
  }
  for (auto y : kAllLabels)
    for (double& v : m.params.variance[index_of(y)]) v /= static_cast<double>(count[index_of(y)]);

  double max_pooled = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    double mean = 0.0;
    for (const auto& x : xs) mean += x[i];
    mean /= total;
    double var = 0.0;
    for (const auto& x : xs) var += (x[i] - mean) * (x[i] - mean);
    max_pooled = std::max(max_pooled, var / total);
  }
  m.variance_floor = config.variance_floor_scale * (max_pooled > 0.0 ? max_pooled : 1.0);
  for (auto& vars : m.params.variance)
    for (double& v : vars) v = std::max(v, m.variance_floor);

  // Renormalize priors.
  const double psum = m.priors[0] + m.priors[1] + m.priors[2];
  for (double& p : m.priors) p /= psum;
  return m;
}

inline NBModel train(std::span<const LabeledDoc> labeled, const NBConfig& config = {}) {
  config.validate();
  std::vector<ProcessedDoc> docs;
  std::vector<ClassLabel> labels;
  docs.reserve(labeled.size());
  for (const auto& l : labeled) {
    docs.push_back(l.doc);
    labels.push_back(l.label);
  }
  Vocabulary vocab = build_vocabulary(docs, config.min_count);
  std::vector<FeatureVector> xs;
  xs.reserve(docs.size());
  for (const auto& d : docs) xs.push_back(featurize(d, vocab));
  return train_features(std::move(vocab), xs, labels, config);
}

/// log P(y) + sum_i log N(x_i; mu_{y,i}, var_{y,i}) for each class.
inline std::array<double, 3> log_joint(const NBModel& model, std::span<const double> x) {
  const std::size_t n = model.vocabulary.size();
  if (x.size() != n)
    throw Error("nbayes", "feature dimension " + std::to_string(x.size()) + " != vocabulary size " +
                              std::to_string(n));
  constexpr double kLog2Pi = 1.8378770664093454836;  // log(2*pi)
  std::array<double, 3> out{};
  for (auto y : kAllLabels) {
    const std::size_t c = index_of(y);
    double s = std::log(model.priors[c]);
    const auto& mu = model.params.mean[c];
    const auto& var = model.params.variance[c];
    for (std::size_t i = 0; i < n; ++i) {
      const double d = x[i] - mu[i];
      s -= 0.5 * (kLog2Pi + std::log(var[i])) + d * d / (2.0 * var[i]);
    }
    out[c] = s;
  }
  return out;
}

/// Normalizes log scores with the max-shift exponential sum.
inline std::array<double, 3> normalize_log_scores(const std::array<double, 3>& logs) {
  const double top = std::max({logs[0], logs[1], logs[2]});
  std::array<double, 3> p{};
  double z = 0.0;
  for (std::size_t c = 0; c < 3; ++c) z += (p[c] = std::exp(logs[c] - top));
  for (double& v : p) v /= z;
  return p;
}

inline std::array<double, 3> posterior(const NBModel& model, std::span<const double> x) {
  return normalize_log_scores(log_joint(model, x));
}

/// Argmax with rejection. Exact ties go to neutral first, then negative
/// before positive; the winner must exceed `threshold` strictly.
inline Prediction decide(const std::array<double, 3>& post, double threshold) {
  static constexpr std::array<ClassLabel, 3> kPreference{ClassLabel::neutral, ClassLabel::negative,
                                                         ClassLabel::positive};
  ClassLabel best = kPreference[0];
  for (auto y : kPreference)
    if (post[index_of(y)] > post[index_of(best)]) best = y;
  if (post[index_of(best)] > threshold) return best;
  return std::nullopt;
}

inline Prediction classify(const NBModel& model, std::span<const double> x) {
  return decide(posterior(model, x), model.config.rejection_threshold);
}

/// P(positive) - P(negative), tagged nbayes. Callers drop rejected
/// documents before aggregating.
inline SentimentScore nb_sentiment_score(const std::array<double, 3>& post) {
  const double v = post[index_of(ClassLabel::positive)] - post[index_of(ClassLabel::negative)];
  return {clamp_open_unit(v), Engine::nbayes};
}

inline SentimentScore nb_sentiment_score(const NBModel& model, std::span<const double> x) {
  return nb_sentiment_score(posterior(model, x));
}

// ---------------------------------------------------------------------------
// Model file: versioned, line-oriented, one row per vocabulary token.

inline constexpr std::string_view kModelMagic = "fxsig-nb-model v1";

inline void save_model(std::ostream& out, const NBModel& m) {
  out << kModelMagic << '\n';
  out << "min_count " << m.config.min_count << '\n';
  out << "variance_floor_scale " << format_shortest(m.config.variance_floor_scale) << '\n';
  out << "rejection_threshold " << format_shortest(m.config.rejection_threshold) << '\n';
  out << "variance_floor " << format_shortest(m.variance_floor) << '\n';
  for (auto y : kAllLabels)
    out << "prior " << to_string(y) << ' ' << format_shortest(m.priors[index_of(y)]) << '\n';
  out << "features " << m.vocabulary.size() << '\n';
  out << "# token\tmean_negative\tmean_neutral\tmean_positive\tvar_negative\tvar_neutral\tvar_positive\n";
  for (std::size_t i = 0; i < m.vocabulary.size(); ++i) {
    out << m.vocabulary.tokens()[i];
    for (const auto& mu : m.params.mean) out << '\t' << format_shortest(mu[i]);
    for (const auto& var : m.params.variance) out << '\t' << format_shortest(var[i]);
    out << '\n';
  }
}

inline NBModel load_model(std::istream& in) {
  auto fail = [](const std::string& what) { return Error("nbayes", "model file: " + what); };
  std::string line;
  if (!std::getline(in, line) || line != kModelMagic) throw fail("bad or unsupported header");

  auto read_kv = [&](std::string_view key) {
    if (!std::getline(in, line)) throw fail("truncated before " + std::string(key));
    std::istringstream ls(line);
    std::string k;
    ls >> k;
    if (k != key) throw fail("expected '" + std::string(key) + "', found '" + k + "'");
    std::string rest;
    std::getline(ls, rest);
    return std::string(trim(rest));
  };
  auto number = [&](std::string_view key) {
    const auto v = parse_double(read_kv(key));
    if (!v) throw fail("bad value for " + std::string(key));
    return *v;
  };

  NBModel m;
  m.config.min_count = static_cast<int>(number("min_count"));
  m.config.variance_floor_scale = number("variance_floor_scale");
  m.config.rejection_threshold = number("rejection_threshold");
  m.config.validate();
  m.variance_floor = number("variance_floor");
  if (!(m.variance_floor > 0.0)) throw fail("variance_floor must be > 0");
  for (auto y : kAllLabels) {
    const std::string v = read_kv("prior");
    const auto sp = v.find(' ');
    if (sp == std::string::npos || v.substr(0, sp) != to_string(y)) throw fail("priors out of order");
    const auto p = parse_double(trim(std::string_view(v).substr(sp + 1)));
    if (!p || !(*p > 0.0)) throw fail("prior must be > 0");
    m.priors[index_of(y)] = *p;
  }
  if (std::abs(m.priors[0] + m.priors[1] + m.priors[2] - 1.0) > 1e-12)
    throw fail("priors do not sum to 1");
  const auto n_features = parse_double(read_kv("features"));
  if (!n_features || *n_features < 1) throw fail("bad feature count");
  const auto n = static_cast<std::size_t>(*n_features);

  std::vector<std::string> tokens;
  for (auto& v : m.params.mean) v.reserve(n);
  for (auto& v : m.params.variance) v.reserve(n);
  while (tokens.size() < n && std::getline(in, line)) {
    if (line.empty() || line.front() == '#') continue;
    std::vector<std::string_view> cells;
    std::string_view rest(line);
    for (auto tab = rest.find('\t'); ; tab = rest.find('\t')) {
      cells.push_back(rest.substr(0, tab));
      if (tab == std::string_view::npos) break;
      rest.remove_prefix(tab + 1);
    }
    if (cells.size() != 7) throw fail("feature row needs 7 columns: " + line);
    if (!tokens.empty() && !(tokens.back() < cells[0])) throw fail("tokens not strictly sorted");
    tokens.emplace_back(cells[0]);
    for (std::size_t c = 0; c < 6; ++c) {
      const auto v = parse_double(cells[c + 1]);
      if (!v) throw fail("bad number in row for '" + tokens.back() + "'");
      if (c < 3) {
        m.params.mean[c].push_back(*v);
      } else {
        if (*v < m.variance_floor) throw fail("variance below floor for '" + tokens.back() + "'");
        m.params.variance[c - 3].push_back(*v);
      }
    }
  }
  if (tokens.size() != n) throw fail("expected " + std::to_string(n) + " feature rows");
  m.vocabulary = Vocabulary(std::move(tokens), m.config.min_count);
  return m;
}

inline void save_model_file(const std::string& path, const NBModel& m) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("nbayes", "cannot write model file " + path);
  save_model(out, m);
}

inline NBModel load_model_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("nbayes", "cannot open model file " + path);
  return load_model(in);
}

}  // namespace fxsig
