#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numeric>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "sudo/error.hpp"

namespace sudo {

enum class MetricKind { auc, accuracy, precision, recall, npv };

inline std::string_view to_string(MetricKind k) {
  switch (k) {
    case MetricKind::auc: return "auc";
    case MetricKind::accuracy: return "accuracy";
    case MetricKind::precision: return "precision";
    case MetricKind::recall: return "recall";
    case MetricKind::npv: return "npv";
  }
  return "unknown";
}

inline MetricKind parse_metric(std::string_view s) {
  if (s == "auc") return MetricKind::auc;
  if (s == "accuracy") return MetricKind::accuracy;
  if (s == "precision") return MetricKind::precision;
  if (s == "recall") return MetricKind::recall;
  if (s == "npv") return MetricKind::npv;
  throw ConfigError("unknown metric '" + std::string(s) + "'");
}

enum class CorrelationKind { spearman, pearson };

inline std::string_view to_string(CorrelationKind k) {
  return k == CorrelationKind::spearman ? "spearman" : "pearson";
}

inline CorrelationKind parse_correlation(std::string_view s) {
  if (s == "spearman") return CorrelationKind::spearman;
  if (s == "pearson") return CorrelationKind::pearson;
  throw ConfigError("unknown correlation '" + std::string(s) + "'");
}

// 1-based ranks; tied values share the mean of the ranks they span.
inline std::vector<double> average_ranks(std::span<const double> x) {
  const std::size_t n = x.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return x[a] < x[b]; });
  std::vector<double> ranks(n);
  for (std::size_t i = 0; i < n;) {
    std::size_t j = i;
    while (j + 1 < n && x[order[j + 1]] == x[order[i]]) ++j;
    const double r = 0.5 * static_cast<double>(i + j) + 1.0;
    for (std::size_t k = i; k <= j; ++k) ranks[order[k]] = r;
    i = j + 1;
  }
  return ranks;
}

// Mann-Whitney AUC: P(score_pos > score_neg) + 0.5 P(tie). Labels are 0/1.
inline double auc(std::span<const double> scores, std::span<const int> labels) {
  if (scores.size() != labels.size()) throw DataError("auc: scores and labels differ in length");
  const auto ranks = average_ranks(scores);
  double pos_rank_sum = 0.0;
  std::size_t n_pos = 0;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (labels[i] != 0 && labels[i] != 1) throw DataError("auc: labels must be binary");
    if (labels[i] == 1) {
      pos_rank_sum += ranks[i];
      ++n_pos;
    }
  }
  const std::size_t n_neg = labels.size() - n_pos;
  if (n_pos == 0 || n_neg == 0) throw DataError("auc: both classes must be present");
  const double np = static_cast<double>(n_pos);
  const double u = pos_rank_sum - np * (np + 1.0) / 2.0;
  return u / (np * static_cast<double>(n_neg));
}

struct ConfusionCounts {
  std::size_t tp = 0, fp = 0, tn = 0, fn = 0;
};

struct ThresholdMetrics {
  ConfusionCounts counts;
  std::optional<double> accuracy;
  std::optional<double> precision;
  std::optional<double> recall;
  std::optional<double> npv;
};

inline constexpr double kDefaultDecisionThreshold = 0.5;

// Predicts 1 iff score >= threshold. Metrics with an empty denominator are
// absent rather than zero.
inline ThresholdMetrics threshold_metrics(std::span<const double> scores, std::span<const int> labels,
                                          double threshold = kDefaultDecisionThreshold) {
  if (scores.size() != labels.size()) throw DataError("threshold_metrics: length mismatch");
  ThresholdMetrics m;
  auto& c = m.counts;
  for (std::size_t i = 0; i < scores.size(); ++i) {
    if (labels[i] != 0 && labels[i] != 1) throw DataError("threshold_metrics: labels must be binary");
    const bool pred = scores[i] >= threshold;
    const bool truth = labels[i] == 1;
    if (pred && truth) ++c.tp;
    else if (pred) ++c.fp;
    else if (truth) ++c.fn;
    else ++c.tn;
  }
  auto ratio = [](std::size_t num, std::size_t den) -> std::optional<double> {
    if (den == 0) return std::nullopt;
    return static_cast<double>(num) / static_cast<double>(den);
  };
  m.accuracy = ratio(c.tp + c.tn, c.tp + c.tn + c.fp + c.fn);
  m.precision = ratio(c.tp, c.tp + c.fp);
  m.recall = ratio(c.tp, c.tp + c.fn);
  m.npv = ratio(c.tn, c.tn + c.fn);
  return m;
}

// Single scalar for probe evaluation. An undefined threshold metric scores 0.
inline double evaluate_metric(MetricKind kind, std::span<const double> scores, std::span<const int> labels,
                              double threshold = kDefaultDecisionThreshold) {
  if (kind == MetricKind::auc) return auc(scores, labels);
  const auto m = threshold_metrics(scores, labels, threshold);
  switch (kind) {
    case MetricKind::accuracy: return m.accuracy.value_or(0.0);
    case MetricKind::precision: return m.precision.value_or(0.0);
    case MetricKind::recall: return m.recall.value_or(0.0);
    case MetricKind::npv: return m.npv.value_or(0.0);
    default: break;
  }
  return 0.0;
}

inline double pearson_correlation(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) throw DataError("correlation: length mismatch");
  if (x.size() < 2) throw DataError("correlation: need at least 2 points");
  const double n = static_cast<double>(x.size());
  const double mx = std::accumulate(x.begin(), x.end(), 0.0) / n;
  const double my = std::accumulate(y.begin(), y.end(), 0.0) / n;
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double dx = x[i] - mx, dy = y[i] - my;
    sxy += dx * dy;
    sxx += dx * dx;
    syy += dy * dy;
  }
  if (sxx == 0.0 || syy == 0.0) throw DataError("correlation: zero variance");
  return std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
}

// Spearman's rho: Pearson correlation of average ranks.
inline double spearman_correlation(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) throw DataError("rank_correlation: length mismatch");
  if (x.size() < 3) throw DataError("rank_correlation: need at least 3 points");
  const auto rx = average_ranks(x);
  const auto ry = average_ranks(y);
  try {
    return pearson_correlation(rx, ry);
  } catch (const DataError&) {
    throw DataError("rank_correlation: zero rank variance");
  }
}

inline double rank_correlation(std::span<const double> x, std::span<const double> y,
                               CorrelationKind kind = CorrelationKind::spearman) {
  if (kind == CorrelationKind::pearson) {
    if (x.size() < 3) throw DataError("rank_correlation: need at least 3 points");
    return pearson_correlation(x, y);
  }
  return spearman_correlation(x, y);
}

}  // namespace sudo
