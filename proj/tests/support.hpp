#pragma once

#include <cstdlib>
#include <filesystem>
#include <string>
#include <vector>

#include "sudo/sudo.hpp"

namespace testing_support {

using namespace sudo;

inline PredictionRecord rec(std::string id, std::vector<double> x, double p, std::optional<int> label = std::nullopt) {
  PredictionRecord r;
  r.id = std::move(id);
  r.features = std::move(x);
  r.p = p;
  r.label = label;
  return r;
}

// Fresh empty directory under the system temp dir.
inline std::filesystem::path scratch_dir(const std::string& name) {
  auto dir = std::filesystem::temp_directory_path() / ("sudo_test_" + name);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

// Spearman rho between per-interval sudo and oracle proportion-positive.
inline double oracle_rho(const SudoReport& report, const Dataset& wild, const HiddenLabels& hidden,
                         const IntervalScheme& scheme) {
  return validate_correlation(report, contamination_profile(wild, hidden, scheme)).rho;
}

struct GroupMix {
  std::string name;
  std::size_t negatives;
  std::size_t positives;
};

// Wild records drawn class-conditionally from a study and assigned to groups
// with fixed class mixes. Every record gets a score spread over (0, 0.2] so all
// groups share one low-probability interval.
inline Dataset grouped_wild(const SimulatedStudy& study, const std::vector<GroupMix>& groups) {
  std::vector<std::size_t> neg, pos;
  for (std::size_t i = 0; i < study.wild.size(); ++i)
    (study.wild_labels.at(study.wild[i].id) == 1 ? pos : neg).push_back(i);
  std::vector<PredictionRecord> out;
  auto take = [&](std::vector<std::size_t>& from, std::size_t n, const std::string& group) {
    if (from.size() < n) throw DataError("grouped_wild: not enough records of one class");
    for (std::size_t j = 0; j < n; ++j) {
      auto r = study.wild[from.back()];
      from.pop_back();
      r.group = group;
      r.p = 0.2 * (1.0 + static_cast<double>(out.size() % 97)) / 98.0;
      out.push_back(std::move(r));
    }
  };
  for (const auto& g : groups) {
    take(neg, g.negatives, g.name);
    take(pos, g.positives, g.name);
  }
  return Dataset(DatasetRole::wild, std::move(out));
}

}  // namespace testing_support
