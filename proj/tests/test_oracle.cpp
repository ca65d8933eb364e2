#include <gtest/gtest.h>

#include "support.hpp"

using namespace sudo;
using testing_support::rec;

namespace {

SudoReport report_over(const IntervalScheme& scheme, const std::vector<double>& sudo) {
  SudoReport r;
  for (std::size_t i = 0; i < scheme.size(); ++i) {
    IntervalReport iv;
    iv.index = i;
    iv.lower = scheme.lower(i);
    iv.upper = scheme.upper(i);
    iv.evaluated = true;
    iv.sudo = sudo[i];
    r.intervals.push_back(iv);
  }
  return r;
}

}  // namespace

TEST(Contamination, ProportionPositivePerInterval) {
  const Dataset wild(DatasetRole::wild, {rec("a", {0}, 0.1), rec("b", {0}, 0.2), rec("c", {0}, 0.3),
                                         rec("d", {0}, 0.7), rec("e", {0}, 0.9), rec("f", {0}, 0.0)});
  HiddenLabels h;
  for (const char* id : {"a", "b", "f"}) h.set(id, 0);
  for (const char* id : {"c", "d", "e"}) h.set(id, 1);
  const auto prof = contamination_profile(wild, h, IntervalScheme{{0.0, 0.5, 1.0}});
  ASSERT_EQ(prof.intervals.size(), 2u);
  EXPECT_EQ(prof.intervals[0].count, 3u);
  EXPECT_DOUBLE_EQ(prof.intervals[0].proportion_positive, 1.0 / 3.0);
  EXPECT_DOUBLE_EQ(prof.intervals[1].proportion_positive, 1.0);
}

TEST(Contamination, EmptyIntervalAndMissingLabel) {
  const Dataset wild(DatasetRole::wild, {rec("a", {0}, 0.1)});
  HiddenLabels h;
  h.set("a", 1);
  const auto prof = contamination_profile(wild, h, IntervalScheme{{0.0, 0.5, 1.0}});
  EXPECT_EQ(prof.intervals[1].count, 0u);
  EXPECT_EQ(prof.intervals[1].proportion_positive, 0.0);
  EXPECT_THROW(contamination_profile(wild, HiddenLabels{}, IntervalScheme{{0.0, 1.0}}), DataError);
}

TEST(CorrelationCheck, PassesOnlyBelowBound) {
  const auto scheme = IntervalScheme::equal_width(0, 1, 4);
  ContaminationProfile prof;
  for (std::size_t i = 0; i < 4; ++i) prof.intervals.push_back({scheme.lower(i), scheme.upper(i), 10, 0.2 * i});
  const auto good = validate_correlation(report_over(scheme, {0.6, 0.3, -0.1, -0.5}), prof);
  EXPECT_DOUBLE_EQ(good.rho, -1.0);
  EXPECT_TRUE(good.passed);
  const auto bad = validate_correlation(report_over(scheme, {0.6, -0.5, 0.3, -0.1}), prof);
  EXPECT_GT(bad.rho, -0.8);
  EXPECT_FALSE(bad.passed);
  EXPECT_FALSE(validate_correlation(report_over(scheme, {0.6, 0.3, -0.1, -0.5}), prof, -1.5).passed);
}

TEST(CorrelationCheck, SkipsUnevaluatedIntervals) {
  const auto scheme = IntervalScheme::equal_width(0, 1, 4);
  ContaminationProfile prof;
  for (std::size_t i = 0; i < 4; ++i) prof.intervals.push_back({scheme.lower(i), scheme.upper(i), 10, 0.2 * i});
  auto r = report_over(scheme, {0.6, 0.3, 9.0, -0.5});
  r.intervals[2].evaluated = false;
  const auto c = validate_correlation(r, prof);
  EXPECT_EQ(c.sudo.size(), 3u);
  EXPECT_DOUBLE_EQ(c.rho, -1.0);
}

TEST(CorrelationCheck, MismatchedIntervalsRejected) {
  const auto scheme = IntervalScheme::equal_width(0, 1, 4);
  ContaminationProfile prof;
  for (std::size_t i = 0; i < 3; ++i) prof.intervals.push_back({scheme.lower(i), scheme.upper(i), 10, 0.1});
  EXPECT_THROW(validate_correlation(report_over(scheme, {1, 2, 3, 4}), prof), DataError);
  prof.intervals.push_back({0.7, 1.0, 10, 0.1});
  EXPECT_THROW(validate_correlation(report_over(scheme, {1, 2, 3, 4}), prof), DataError);
}
