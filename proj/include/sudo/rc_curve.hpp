#pragma once

// Reliability-completeness curves.
//
// A threshold pair (A, B) accepts predictions p <= max(A) as class 0 and
// p >= min(B) as class 1. Reliability averages |sudo| of the intervals whose
// upper edge is some alpha in A and whose lower edge is some beta in B;
// completeness is the accepted fraction of wild records. AURCC is the
// trapezoidal area under reliability over completeness, divided by the
// completeness span so that a flat curve at height r scores r.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "sudo/dataset.hpp"
#include "sudo/engine.hpp"
#include "sudo/error.hpp"
#include "sudo/text.hpp"

namespace sudo {

struct ThresholdPair {
  std::vector<double> low;   // A
  std::vector<double> high;  // B

  double alpha_star() const { return *std::max_element(low.begin(), low.end()); }
  double beta_star() const { return *std::min_element(high.begin(), high.end()); }

  void validate() const {
    if (low.empty() || high.empty()) throw ConfigError("threshold pair needs non-empty A and B");
    for (double v : low)
      if (!(v >= 0.0 && v <= 1.0)) throw ConfigError("thresholds must lie in [0,1]");
    for (double v : high)
      if (!(v >= 0.0 && v <= 1.0)) throw ConfigError("thresholds must lie in [0,1]");
    if (!(alpha_star() < beta_star())) throw ConfigError("max(A) must be below min(B)");
  }
};

// 0 if p <= max(A), 1 if p >= min(B), abstain otherwise.
inline std::optional<int> selective_predict(double p, const ThresholdPair& pair) {
  if (p <= pair.alpha_star()) return 0;
  if (p >= pair.beta_star()) return 1;
  return std::nullopt;
}

namespace detail {

inline bool same_edge(double a, double b) { return std::fabs(a - b) <= 1e-12; }

inline const IntervalReport& interval_with_upper(const SudoReport& report, double alpha) {
  for (const auto& iv : report.intervals)
    if (same_edge(iv.upper, alpha)) {
      if (!iv.evaluated) throw DataError("threshold " + text::format_double(alpha) + " borders a skipped interval");
      return iv;
    }
  throw DataError("low threshold " + text::format_double(alpha) + " is not an interval upper edge");
}

inline const IntervalReport& interval_with_lower(const SudoReport& report, double beta) {
  for (const auto& iv : report.intervals)
    if (same_edge(iv.lower, beta)) {
      if (!iv.evaluated) throw DataError("threshold " + text::format_double(beta) + " borders a skipped interval");
      return iv;
    }
  throw DataError("high threshold " + text::format_double(beta) + " is not an interval lower edge");
}

}  // namespace detail

inline double reliability(const SudoReport& report, const ThresholdPair& pair) {
  pair.validate();
  double sum = 0.0;
  for (double a : pair.low) {
    const double sa = std::fabs(detail::interval_with_upper(report, a).sudo);
    for (double b : pair.high) sum += sa + std::fabs(detail::interval_with_lower(report, b).sudo);
  }
  return sum / (2.0 * static_cast<double>(pair.low.size() * pair.high.size()));
}

inline double completeness(std::span<const double> probabilities, const ThresholdPair& pair) {
  pair.validate();
  if (probabilities.empty()) throw DataError("completeness of an empty dataset");
  const double a = pair.alpha_star(), b = pair.beta_star();
  std::size_t hit = 0;
  for (double p : probabilities)
    if (p <= a || p >= b) ++hit;
  return static_cast<double>(hit) / static_cast<double>(probabilities.size());
}

inline double completeness(const Dataset& wild, const ThresholdPair& pair) {
  return completeness(wild.probabilities(), pair);
}

struct RcPoint {
  double completeness = 0.0;
  double reliability = 0.0;
};

struct RcCurve {
  std::vector<RcPoint> points;  // ascending completeness, duplicates merged
  double aurcc = 0.0;
  std::size_t pairs_evaluated = 0;  // K
};

// Trapezoidal area over completeness, normalized by the completeness span.
inline double area_under_rc(std::span<const RcPoint> points) {
  if (points.size() < 2) throw DataError("an RC curve needs at least two distinct completeness values");
  double area = 0.0;
  for (std::size_t i = 0; i + 1 < points.size(); ++i)
    area += (points[i + 1].completeness - points[i].completeness) *
            (points[i].reliability + points[i + 1].reliability) / 2.0;
  return area / (points.back().completeness - points.front().completeness);
}

inline RcCurve build_rc_curve(const SudoReport& report, std::span<const double> probabilities,
                              std::span<const ThresholdPair> pairs) {
  if (pairs.size() < 2) throw ConfigError("an RC curve needs at least two threshold pairs");
  std::vector<RcPoint> raw;
  for (const auto& pair : pairs) raw.push_back({completeness(probabilities, pair), reliability(report, pair)});
  std::sort(raw.begin(), raw.end(), [](const RcPoint& a, const RcPoint& b) {
    return a.completeness < b.completeness || (a.completeness == b.completeness && a.reliability < b.reliability);
  });
  RcCurve curve;
  curve.pairs_evaluated = pairs.size();
  for (std::size_t i = 0; i < raw.size();) {
    std::size_t j = i;
    double sum = 0.0;
    while (j < raw.size() && raw[j].completeness == raw[i].completeness) sum += raw[j++].reliability;
    curve.points.push_back({raw[i].completeness, sum / static_cast<double>(j - i)});
    i = j;
  }
  curve.aurcc = area_under_rc(curve.points);
  return curve;
}

inline RcCurve build_rc_curve(const SudoReport& report, const Dataset& wild, std::span<const ThresholdPair> pairs) {
  return build_rc_curve(report, wild.probabilities(), pairs);
}

// Nested pairs from strictest to loosest: alphas are upper edges of evaluated
// intervals at or below the report's midpoint (ascending), betas are lower
// edges at or above it (descending). Pair k takes the first k+1 of each,
// holding the shorter list at its full length.
inline std::vector<ThresholdPair> default_threshold_pairs(const SudoReport& report) {
  if (report.intervals.empty()) throw DataError("empty report");
  const double mid = 0.5 * (report.intervals.front().lower + report.intervals.back().upper);
  std::vector<double> alphas, betas;
  for (const auto& iv : report.intervals) {
    if (!iv.evaluated) continue;
    if (iv.upper <= mid + 1e-12) alphas.push_back(iv.upper);
    if (iv.lower >= mid - 1e-12) betas.push_back(iv.lower);
  }
  std::reverse(betas.begin(), betas.end());
  if (alphas.empty() || betas.empty())
    throw DataError("report has no evaluated intervals on one side of its midpoint");
  std::vector<ThresholdPair> pairs;
  const std::size_t k = std::max(alphas.size(), betas.size());
  for (std::size_t i = 0; i < k; ++i) {
    ThresholdPair pair;
    pair.low.assign(alphas.begin(), alphas.begin() + static_cast<std::ptrdiff_t>(std::min(i + 1, alphas.size())));
    pair.high.assign(betas.begin(), betas.begin() + static_cast<std::ptrdiff_t>(std::min(i + 1, betas.size())));
    if (pair.alpha_star() < pair.beta_star()) pairs.push_back(std::move(pair));
  }
  return pairs;
}

inline std::string rc_curve_csv(const RcCurve& curve) {
  std::ostringstream os;
  os << "completeness,reliability\n";
  for (const auto& p : curve.points)
    os << text::format_double(p.completeness) << ',' << text::format_double(p.reliability) << '\n';
  return os.str();
}

}  // namespace sudo
