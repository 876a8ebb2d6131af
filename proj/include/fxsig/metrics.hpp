#pragma once

// Three-class confusion matrix with abstentions, and accuracy / macro
// precision / recall / F1 reporting.

#include <array>
#include <ostream>
#include <span>
#include <string>

#include <json.hpp>

#include "fxsig/common.hpp"

namespace fxsig {

/// counts[gold][predicted]; rejected predictions are tallied separately.
struct ConfusionMatrix {
  std::array<std::array<std::size_t, 3>, 3> counts{};
  std::size_t abstentions = 0;

  std::size_t total() const noexcept {
    std::size_t n = 0;
    for (const auto& row : counts)
      for (auto c : row) n += c;
    return n;
  }
  std::size_t at(ClassLabel gold, ClassLabel predicted) const noexcept {
    return counts[index_of(gold)][index_of(predicted)];
  }

  friend bool operator==(const ConfusionMatrix&, const ConfusionMatrix&) = default;
};

inline ConfusionMatrix confusion(std::span<const Prediction> predictions,
                                 std::span<const ClassLabel> golds) {
  if (predictions.size() != golds.size())
    throw Error("metrics", "predictions/golds length mismatch (" + std::to_string(predictions.size()) +
                               " vs " + std::to_string(golds.size()) + ")");
  if (golds.empty()) throw Error("metrics", "nothing to evaluate");
  ConfusionMatrix m;
  for (std::size_t i = 0; i < golds.size(); ++i) {
    if (predictions[i]) ++m.counts[index_of(golds[i])][index_of(*predictions[i])];
    else ++m.abstentions;
  }
  return m;
}

struct ClassMetrics {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  std::size_t support = 0;  // gold count among non-abstained documents
};

struct MetricsReport {
  double accuracy = 0.0;
  double macro_precision = 0.0;
  double macro_recall = 0.0;
  double macro_f1 = 0.0;
  std::array<ClassMetrics, 3> per_class{};  // indexed by ClassLabel
  double coverage = 1.0;
  std::size_t evaluated = 0;
  std::size_t abstentions = 0;
};

/// Harmonic mean of precision and recall; 0 when both are 0.
inline double f1_score(double precision, double recall) noexcept {
  return precision + recall > 0.0 ? 2.0 * precision * recall / (precision + recall) : 0.0;
}

inline MetricsReport compute_metrics(const ConfusionMatrix& m) {
  const std::size_t total = m.total();
  if (total == 0) throw Error("metrics", "empty confusion matrix");
  MetricsReport r;
  r.evaluated = total + m.abstentions;
  r.abstentions = m.abstentions;
  r.coverage = 1.0 - static_cast<double>(m.abstentions) / static_cast<double>(r.evaluated);

  std::size_t trace = 0;
  for (std::size_t c = 0; c < 3; ++c) {
    std::size_t row = 0;
    std::size_t col = 0;
    for (std::size_t k = 0; k < 3; ++k) {
      row += m.counts[c][k];
      col += m.counts[k][c];
    }
    const auto tp = m.counts[c][c];
    trace += tp;
    auto& pc = r.per_class[c];
    pc.precision = col ? static_cast<double>(tp) / static_cast<double>(col) : 0.0;
    pc.recall = row ? static_cast<double>(tp) / static_cast<double>(row) : 0.0;
    pc.f1 = f1_score(pc.precision, pc.recall);
    pc.support = row;
    r.macro_precision += pc.precision / 3.0;
    r.macro_recall += pc.recall / 3.0;
    r.macro_f1 += pc.f1 / 3.0;
  }
  r.accuracy = static_cast<double>(trace) / static_cast<double>(total);
  return r;
}

inline nlohmann::ordered_json to_json(const MetricsReport& r, std::string_view model_name) {
  nlohmann::ordered_json j;
  j["model"] = model_name;
  j["accuracy"] = r.accuracy;
  j["macro_precision"] = r.macro_precision;
  j["macro_recall"] = r.macro_recall;
  j["macro_f1"] = r.macro_f1;
  j["coverage"] = r.coverage;
  j["evaluated"] = r.evaluated;
  j["abstentions"] = r.abstentions;
  auto& pc = j["per_class"];
  for (auto y : kAllLabels) {
    const auto& c = r.per_class[index_of(y)];
    pc[std::string(to_string(y))] = {
        {"precision", c.precision}, {"recall", c.recall}, {"f1", c.f1}, {"support", c.support}};
  }
  return j;
}

/// Aligned text table: one summary row in the Accuracy / Precision / Recall
/// / F1 Score layout, followed by the per-class breakdown.
inline void write_metrics_text(std::ostream& out, const MetricsReport& r, std::string_view model_name) {
  auto pad = [](std::string s, std::size_t w) {
    if (s.size() < w) s.append(w - s.size(), ' ');
    return s;
  };
  const std::size_t w0 = std::max<std::size_t>(16, model_name.size() + 2);
  out << pad("Model", w0) << pad("Accuracy", 10) << pad("Precision", 11) << pad("Recall", 8)
      << "F1 Score\n";
  out << pad(std::string(model_name), w0) << pad(format_fixed(100.0 * r.accuracy, 0) + "%", 10)
      << pad(format_fixed(r.macro_precision, 2), 11) << pad(format_fixed(r.macro_recall, 2), 8)
      << format_fixed(r.macro_f1, 2) << "\n\n";
  out << pad("Class", w0) << pad("Precision", 11) << pad("Recall", 8) << pad("F1", 8) << "Support\n";
  for (auto y : kAllLabels) {
    const auto& c = r.per_class[index_of(y)];
    out << pad(std::string(to_string(y)), w0) << pad(format_fixed(c.precision, 4), 11)
        << pad(format_fixed(c.recall, 4), 8) << pad(format_fixed(c.f1, 4), 8) << c.support << '\n';
  }
  out << "\nCoverage " << format_fixed(100.0 * r.coverage, 2) << "% (" << r.abstentions
      << " abstained of " << r.evaluated << ")\n";
}

}  // namespace fxsig
