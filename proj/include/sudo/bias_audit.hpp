#pragma once

// Per-group discrepancy reports under one shared configuration, plus
// pairwise differences and an optional hidden-label check.

#include <algorithm>
#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "sudo/dataset.hpp"
#include "sudo/engine.hpp"
#include "sudo/error.hpp"
#include "sudo/metrics.hpp"

namespace sudo {

struct GroupReport {
  std::string group;
  std::size_t wild_count = 0;
  bool evaluated = false;
  std::string note;
  std::optional<SudoReport> report;
};

struct GroupDelta {
  std::string group_a;
  std::string group_b;
  std::vector<std::size_t> intervals;  // indices evaluated in both groups
  std::vector<double> delta;           // sudo_a - sudo_b
};

struct BiasReport {
  std::vector<GroupReport> groups;  // sorted by group name
  std::vector<GroupDelta> deltas;
  std::vector<std::string> warnings;
};

// Groups with fewer than 2m wild records are skipped; with automatic m the
// threshold uses the smallest evaluable interval size instead.
inline BiasReport run_bias_audit(const Dataset& wild, const Dataset& train, const Dataset& held_out,
                                 const SudoRunConfig& cfg) {
  cfg.validate();
  if (!wild.has_groups()) throw DataError("bias audit needs a group value on every wild record");
  std::map<std::string, std::vector<std::size_t>> members;
  for (std::size_t i = 0; i < wild.size(); ++i) members[*wild[i].group].push_back(i);

  const std::size_t per_interval = cfg.m ? *cfg.m : std::max<std::size_t>(2, cfg.min_interval_count);
  const std::size_t minimum = 2 * per_interval;

  BiasReport out;
  for (const auto& [name, idx] : members) {
    GroupReport g;
    g.group = name;
    g.wild_count = idx.size();
    if (idx.size() < minimum) {
      g.note = "skipped: " + std::to_string(idx.size()) + " records, minimum " + std::to_string(minimum);
    } else {
      try {
        g.report = run_sudo(wild.subset(idx), train, held_out, cfg);
        g.evaluated = true;
      } catch (const DataError& e) {
        g.note = std::string("skipped: ") + e.what();
      }
    }
    if (!g.evaluated) out.warnings.push_back("group '" + name + "' " + g.note);
    out.groups.push_back(std::move(g));
  }

  std::vector<const GroupReport*> ok;
  for (const auto& g : out.groups)
    if (g.evaluated) ok.push_back(&g);
  if (ok.size() < 2)
    throw DataError("bias audit needs at least two evaluable groups, found " + std::to_string(ok.size()));

  for (std::size_t a = 0; a < ok.size(); ++a)
    for (std::size_t b = a + 1; b < ok.size(); ++b) {
      GroupDelta d{ok[a]->group, ok[b]->group, {}, {}};
      const auto& ra = ok[a]->report->intervals;
      const auto& rb = ok[b]->report->intervals;
      for (std::size_t i = 0; i < ra.size(); ++i)
        if (ra[i].evaluated && rb[i].evaluated) {
          d.intervals.push_back(i);
          d.delta.push_back(ra[i].sudo - rb[i].sudo);
        }
      out.deltas.push_back(std::move(d));
    }
  return out;
}

struct GroupLabelCheck {
  std::string group;
  std::size_t count = 0;
  ConfusionCounts confusion;
  std::optional<double> npv;
  std::optional<double> precision;
};

// Per-group confusion counts of thresholded p against hidden labels.
inline std::vector<GroupLabelCheck> validate_bias_with_labels(const Dataset& wild, const HiddenLabels& hidden,
                                                              double threshold = kDefaultDecisionThreshold) {
  if (!wild.has_groups()) throw DataError("label check needs a group value on every wild record");
  std::map<std::string, std::pair<std::vector<double>, std::vector<int>>> by_group;
  for (const auto& r : wild.records()) {
    auto label = hidden.find(r.id);
    if (!label) throw DataError("missing hidden label for wild record '" + r.id + "'");
    if (*label != 0 && *label != 1) throw DataError("label check needs binary hidden labels");
    auto& [p, y] = by_group[*r.group];
    p.push_back(r.p);
    y.push_back(*label);
  }
  std::vector<GroupLabelCheck> out;
  for (const auto& [name, py] : by_group) {
    const auto tm = threshold_metrics(py.first, py.second, threshold);
    out.push_back({name, py.first.size(), tm.counts, tm.npv, tm.precision});
  }
  return out;
}

}  // namespace sudo
