#pragma once

// Hidden-label oracles. These are the only routines that read HiddenLabels;
// nothing in the engine can reach them.

#include <cstddef>
#include <string>
#include <vector>

#include "sudo/dataset.hpp"
#include "sudo/engine.hpp"
#include "sudo/error.hpp"
#include "sudo/metrics.hpp"

namespace sudo {

struct ContaminationProfile {
  struct Entry {
    double lower = 0.0;
    double upper = 0.0;
    std::size_t count = 0;
    double proportion_positive = 0.0;  // NaN-free: 0 when count == 0
  };
  std::vector<Entry> intervals;
};

inline ContaminationProfile contamination_profile(const Dataset& wild, const HiddenLabels& hidden,
                                                  const IntervalScheme& scheme) {
  const auto disc = discretize(wild, scheme);
  ContaminationProfile prof;
  for (std::size_t i = 0; i < scheme.size(); ++i) {
    ContaminationProfile::Entry e;
    e.lower = scheme.lower(i);
    e.upper = scheme.upper(i);
    e.count = disc.members[i].size();
    std::size_t pos = 0;
    for (auto r : disc.members[i]) {
      auto label = hidden.find(wild[r].id);
      if (!label) throw DataError("missing hidden label for wild record '" + wild[r].id + "'");
      if (*label == 1) ++pos;
    }
    e.proportion_positive = e.count == 0 ? 0.0 : static_cast<double>(pos) / static_cast<double>(e.count);
    prof.intervals.push_back(e);
  }
  return prof;
}

struct CorrelationCheck {
  double rho = 0.0;
  double bound = 0.0;
  bool passed = false;
  std::vector<double> sudo;
  std::vector<double> proportion_positive;
};

// Spearman rho between per-interval sudo and proportion positive over the
// report's evaluated intervals; passes iff rho <= bound (a negative number
// under the sign convention that negative-dominated intervals score high).
inline CorrelationCheck validate_correlation(const SudoReport& report, const ContaminationProfile& profile,
                                             double bound = -0.8,
                                             CorrelationKind kind = CorrelationKind::spearman) {
  if (report.intervals.size() != profile.intervals.size())
    throw DataError("report and contamination profile cover different intervals");
  CorrelationCheck out;
  out.bound = bound;
  for (std::size_t i = 0; i < report.intervals.size(); ++i) {
    const auto& iv = report.intervals[i];
    const auto& pe = profile.intervals[i];
    if (iv.lower != pe.lower || iv.upper != pe.upper)
      throw DataError("interval " + std::to_string(i) + " boundaries differ between report and profile");
    if (!iv.evaluated) continue;
    out.sudo.push_back(iv.sudo);
    out.proportion_positive.push_back(pe.proportion_positive);
  }
  out.rho = rank_correlation(out.sudo, out.proportion_positive, kind);
  out.passed = out.rho <= bound;
  return out;
}

}  // namespace sudo
