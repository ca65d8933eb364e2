#pragma once

// Kaplan-Meier estimation and survival-based checks of discrepancy reports.

#include <algorithm>
#include <cstddef>
#include <functional>
#include <numeric>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "sudo/dataset.hpp"
#include "sudo/engine.hpp"
#include "sudo/error.hpp"
#include "sudo/metrics.hpp"
#include "sudo/text.hpp"

namespace sudo {

// Product-limit step function. One row per distinct observed time (events or
// censorings); survival[i] is S just after times[i].
struct SurvivalCurve {
  std::vector<double> times;
  std::vector<double> survival;
  std::vector<std::size_t> at_risk;
  std::vector<std::size_t> events;
  std::vector<std::size_t> censored;
  std::optional<double> median;

  double survival_at(double t) const {
    double s = 1.0;
    for (std::size_t i = 0; i < times.size() && times[i] <= t; ++i) s = survival[i];
    return s;
  }

  // Number of subjects still under observation at time t (time >= t).
  std::size_t risk_set_at(double t) const {
    for (std::size_t i = 0; i < times.size(); ++i)
      if (times[i] >= t) return at_risk[i];
    return 0;
  }
};

// Deaths at a tied time are counted before the censorings at that time.
inline SurvivalCurve kaplan_meier(const std::vector<double>& times, const std::vector<bool>& events) {
  if (times.size() != events.size()) throw DataError("kaplan_meier: times and events differ in length");
  if (times.empty()) throw DataError("kaplan_meier: empty input");
  for (double t : times)
    if (!(t >= 0.0)) throw DataError("kaplan_meier: negative or invalid time");

  std::vector<std::size_t> order(times.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return times[a] < times[b]; });

  SurvivalCurve c;
  std::size_t n = times.size();
  double s = 1.0;
  for (std::size_t i = 0; i < order.size();) {
    const double t = times[order[i]];
    std::size_t d = 0, cens = 0;
    while (i < order.size() && times[order[i]] == t) {
      if (events[order[i]]) ++d;
      else ++cens;
      ++i;
    }
    if (d > 0) s *= 1.0 - static_cast<double>(d) / static_cast<double>(n);
    c.times.push_back(t);
    c.survival.push_back(s);
    c.at_risk.push_back(n);
    c.events.push_back(d);
    c.censored.push_back(cens);
    if (!c.median && d > 0 && s <= 0.5) c.median = t;
    n -= d + cens;
  }
  return c;
}

inline SurvivalCurve kaplan_meier(const Dataset& ds) {
  std::vector<double> t;
  std::vector<bool> e;
  for (const auto& r : ds.records()) {
    if (!r.survival_time) throw DataError("record '" + r.id + "' has no survival data");
    t.push_back(*r.survival_time);
    e.push_back(*r.event);
  }
  return kaplan_meier(t, e);
}

// Probability range with explicit endpoint closure, e.g. "(0,0.2]" or "[0.5,1)".
struct ProbabilityRange {
  double lo = 0.0;
  double hi = 1.0;
  bool lo_closed = false;
  bool hi_closed = true;

  bool contains(double p) const {
    const bool above = lo_closed ? p >= lo : p > lo;
    const bool below = hi_closed ? p <= hi : p < hi;
    return above && below;
  }

  bool overlaps(const ProbabilityRange& o) const {
    const double l = std::max(lo, o.lo), h = std::min(hi, o.hi);
    if (l < h) return true;
    if (l > h) return false;
    // touching at a single point: overlap iff both include it
    return contains(l) && o.contains(l);
  }

  std::string str() const {
    return std::string(lo_closed ? "[" : "(") + text::format_double(lo) + "," + text::format_double(hi) +
           (hi_closed ? "]" : ")");
  }

  static ProbabilityRange parse(std::string_view s) {
    auto fail = [&] { return ConfigError("bad probability range '" + std::string(s) + "', expected e.g. (0,0.2]"); };
    if (s.size() < 5) throw fail();
    ProbabilityRange r;
    if (s.front() == '[') r.lo_closed = true;
    else if (s.front() != '(') throw fail();
    if (s.back() == ']') r.hi_closed = true;
    else if (s.back() == ')') r.hi_closed = false;
    else throw fail();
    const auto body = s.substr(1, s.size() - 2);
    const auto comma = body.find(',');
    if (comma == std::string_view::npos) throw fail();
    auto lo = text::parse_double(body.substr(0, comma));
    auto hi = text::parse_double(body.substr(comma + 1));
    if (!lo || !hi || !(*lo < *hi) || *lo < 0.0 || *hi > 1.0) throw fail();
    r.lo = *lo;
    r.hi = *hi;
    return r;
  }
};

struct Stratum {
  std::string name;
  ProbabilityRange range;
};

struct StratumSurvival {
  std::string name;
  ProbabilityRange range;
  std::size_t count = 0;
  std::optional<SurvivalCurve> curve;  // absent for an empty stratum
};

inline Dataset filter_records(const Dataset& ds, const std::function<bool(const PredictionRecord&)>& keep) {
  std::vector<std::size_t> idx;
  for (std::size_t i = 0; i < ds.size(); ++i)
    if (keep(ds[i])) idx.push_back(i);
  if (idx.empty()) throw DataError("filter removed every record");
  return ds.subset(idx);
}

inline std::vector<StratumSurvival> stratified_survival(const Dataset& wild, std::span<const Stratum> strata,
                                                        std::vector<std::string>* warnings = nullptr) {
  for (std::size_t i = 0; i < strata.size(); ++i)
    for (std::size_t j = i + 1; j < strata.size(); ++j)
      if (strata[i].range.overlaps(strata[j].range))
        throw ConfigError("strata '" + strata[i].name + "' and '" + strata[j].name + "' overlap");
  std::vector<StratumSurvival> out;
  for (const auto& st : strata) {
    StratumSurvival s{st.name, st.range, 0, std::nullopt};
    std::vector<double> t;
    std::vector<bool> e;
    for (const auto& r : wild.records()) {
      if (!st.range.contains(r.p)) continue;
      if (!r.survival_time) throw DataError("record '" + r.id + "' has no survival data");
      t.push_back(*r.survival_time);
      e.push_back(*r.event);
    }
    s.count = t.size();
    if (t.empty()) {
      if (warnings) warnings->push_back("stratum '" + st.name + "' " + st.range.str() + " is empty; skipped");
    } else {
      s.curve = kaplan_meier(t, e);
    }
    out.push_back(std::move(s));
  }
  return out;
}

struct SurvivalCorrelation {
  double rho = 0.0;
  std::vector<std::size_t> intervals;  // report interval indices used
  std::vector<double> sudo;
  std::vector<double> median_survival;
  std::vector<std::size_t> excluded;  // evaluated intervals without a median
};

// Rank correlation between per-interval sudo and per-interval median survival.
inline SurvivalCorrelation correlate_sudo_with_survival(const SudoReport& report, const Dataset& wild,
                                                        CorrelationKind kind = CorrelationKind::spearman) {
  SurvivalCorrelation out;
  for (const auto& iv : report.intervals) {
    if (!iv.evaluated) continue;
    const ProbabilityRange range{iv.lower, iv.upper, false, true};
    std::vector<double> t;
    std::vector<bool> e;
    for (const auto& r : wild.records()) {
      if (!range.contains(r.p)) continue;
      if (!r.survival_time) throw DataError("record '" + r.id + "' has no survival data");
      t.push_back(*r.survival_time);
      e.push_back(*r.event);
    }
    std::optional<double> median;
    if (!t.empty()) median = kaplan_meier(t, e).median;
    if (!median) {
      out.excluded.push_back(iv.index);
      continue;
    }
    out.intervals.push_back(iv.index);
    out.sudo.push_back(iv.sudo);
    out.median_survival.push_back(*median);
  }
  if (out.intervals.size() < 3)
    throw DataError("only " + std::to_string(out.intervals.size()) +
                    " intervals have a median survival time; need at least 3");
  out.rho = rank_correlation(out.sudo, out.median_survival, kind);
  return out;
}

inline std::string survival_curve_csv(const SurvivalCurve& c) {
  std::ostringstream os;
  os << "t,S,n_at_risk,d\n";
  for (std::size_t i = 0; i < c.times.size(); ++i)
    os << text::format_double(c.times[i]) << ',' << text::format_double(c.survival[i]) << ',' << c.at_risk[i]
       << ',' << c.events[i] << '\n';
  return os.str();
}

}  // namespace sudo
