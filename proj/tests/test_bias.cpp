#include <gtest/gtest.h>

#include <cmath>

#include "support.hpp"

using namespace sudo;
using testing_support::GroupMix;
using testing_support::grouped_wild;

namespace {

const SimulatedStudy& study() {
  static const SimulatedStudy s = simulate_study(SimulationConfig{});
  return s;
}

SudoRunConfig low_interval_config() {
  SudoRunConfig cfg;
  cfg.intervals = IntervalScheme{{0.0, 0.2}};
  cfg.m = 100;
  return cfg;
}

}  // namespace

TEST(BiasAudit, NegativeRichGroupScoresHigher) {
  const auto wild = grouped_wild(study(), {{"A", 180, 20}, {"B", 120, 80}});
  const auto b = run_bias_audit(wild, study().train, study().held_out, low_interval_config());
  ASSERT_EQ(b.groups.size(), 2u);
  EXPECT_EQ(b.groups[0].group, "A");
  ASSERT_EQ(b.deltas.size(), 1u);
  EXPECT_EQ(b.deltas[0].group_a, "A");
  ASSERT_EQ(b.deltas[0].delta.size(), 1u);
  EXPECT_DOUBLE_EQ(b.deltas[0].delta[0],
                   b.groups[0].report->intervals[0].sudo - b.groups[1].report->intervals[0].sudo);
  EXPECT_GT(b.deltas[0].delta[0], 0.0);
}

TEST(BiasAudit, RandomHalvesGiveSmallDelta) {
  // one population split at random; any gap between the halves is sampling noise
  SudoRunConfig cfg;
  cfg.intervals = IntervalScheme{{0.0, 1.0}};
  cfg.m = 100;
  for (std::uint64_t split = 0; split < 10; ++split) {
    auto eng = make_engine(split);
    std::vector<PredictionRecord> rs(study().wild.records().begin(), study().wild.records().end());
    for (auto& r : rs) r.group = uniform_index(eng, 2) == 0 ? "A" : "B";
    const auto b = run_bias_audit(Dataset(DatasetRole::wild, rs), study().train, study().held_out, cfg);
    ASSERT_EQ(b.deltas.size(), 1u);
    EXPECT_LE(std::fabs(b.deltas[0].delta[0]), 0.05) << "split " << split;
  }
}

TEST(BiasAudit, SmallGroupsSkipped) {
  const auto wild = grouped_wild(study(), {{"A", 180, 20}, {"B", 120, 80}, {"C", 150, 49}});
  const auto b = run_bias_audit(wild, study().train, study().held_out, low_interval_config());
  ASSERT_EQ(b.groups.size(), 3u);
  EXPECT_FALSE(b.groups[2].evaluated);
  EXPECT_NE(b.groups[2].note.find("minimum 200"), std::string::npos);
  EXPECT_EQ(b.deltas.size(), 1u);
  EXPECT_EQ(b.warnings.size(), 1u);
}

TEST(BiasAudit, FewerThanTwoGroupsIsAnError) {
  const auto wild = grouped_wild(study(), {{"A", 180, 20}, {"B", 10, 10}});
  EXPECT_THROW(run_bias_audit(wild, study().train, study().held_out, low_interval_config()), DataError);
  EXPECT_THROW(run_bias_audit(study().wild, study().train, study().held_out, low_interval_config()), DataError);
}

TEST(BiasAudit, PairwiseDeltasForThreeGroups) {
  const auto wild = grouped_wild(study(), {{"A", 180, 20}, {"B", 120, 80}, {"C", 150, 50}});
  auto cfg = low_interval_config();
  cfg.k = 2;
  const auto b = run_bias_audit(wild, study().train, study().held_out, cfg);
  ASSERT_EQ(b.deltas.size(), 3u);
  EXPECT_NEAR(b.deltas[0].delta[0] + b.deltas[2].delta[0], b.deltas[1].delta[0], 1e-12);
}

TEST(BiasLabels, NpvPerGroup) {
  const auto wild = grouped_wild(study(), {{"A", 180, 20}, {"B", 120, 80}});
  const auto checks = validate_bias_with_labels(wild, study().wild_labels);
  ASSERT_EQ(checks.size(), 2u);
  EXPECT_DOUBLE_EQ(*checks[0].npv, 0.9);
  EXPECT_DOUBLE_EQ(*checks[1].npv, 0.6);
  EXPECT_FALSE(checks[0].precision.has_value());
  EXPECT_EQ(checks[1].confusion.fn, 80u);
}
