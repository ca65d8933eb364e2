#include <gtest/gtest.h>

#include <fstream>
#include <sys/wait.h>
#include <unistd.h>

#include "support.hpp"

using namespace sudo;
namespace fs = std::filesystem;

namespace {

int run_cli(const std::string& args) {
  const std::string cmd = std::string(SUDOEVAL_BIN) + " " + args + " >/dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::size_t data_rows(const fs::path& csv) {
  std::ifstream in(csv);
  std::string line;
  std::size_t n = 0;
  while (std::getline(in, line))
    if (!line.empty()) ++n;
  return n - 1;
}

Dataset load(const fs::path& path, DatasetRole role) {
  std::ifstream in(path);
  return read_csv_dataset(in, CsvSchema{}, role, path.string());
}

// One simulated study shared by the tests below.
const fs::path& study_dir() {
  static const fs::path dir = [] {
    // ctest runs each test in its own process, possibly at once
    auto d = testing_support::scratch_dir("cli_study_" + std::to_string(::getpid()));
    if (run_cli("--seed 0 --out " + d.string() + " simulate --survival") != 0) throw std::runtime_error("simulate failed");
    if (run_cli("--seed 0 --out " + d.string() + " run --wild " + (d / "wild.csv").string() + " --train " +
                (d / "train.csv").string() + " --held-out " + (d / "held_out.csv").string()) != 0)
      throw std::runtime_error("run failed");
    return d;
  }();
  return dir;
}

std::string in_study(const char* name) { return (study_dir() / name).string(); }

}  // namespace

TEST(Cli, SimulateWritesTheFourFiles) {
  const auto& d = study_dir();
  for (const char* f : {"train.csv", "held_out.csv", "wild.csv", "wild_labels.csv"}) EXPECT_TRUE(fs::exists(d / f)) << f;
  EXPECT_EQ(data_rows(d / "train.csv"), 500u);
  EXPECT_EQ(data_rows(d / "held_out.csv"), 200u);
  EXPECT_EQ(data_rows(d / "wild.csv"), 2000u);
  EXPECT_EQ(data_rows(d / "wild_labels.csv"), 2000u);
  const auto wild = load(d / "wild.csv", DatasetRole::wild);
  EXPECT_TRUE(wild[0].survival_time.has_value());
}

TEST(Cli, ImbalancedScenarioRowCount) {
  const auto d = testing_support::scratch_dir("cli_imbalanced");
  ASSERT_EQ(run_cli("--out " + d.string() + " simulate --scenario shift_imbalanced"), 0);
  EXPECT_EQ(data_rows(d / "wild.csv"), 4500u);
}

TEST(Cli, NoiseFlipsHeldOutLabels) {
  const auto clean = testing_support::scratch_dir("cli_clean");
  const auto noisy = testing_support::scratch_dir("cli_noisy");
  ASSERT_EQ(run_cli("--seed 5 --out " + clean.string() + " simulate"), 0);
  ASSERT_EQ(run_cli("--seed 5 --out " + noisy.string() + " simulate --noise 0.5"), 0);
  const auto a = load(clean / "held_out.csv", DatasetRole::held_out);
  const auto b = load(noisy / "held_out.csv", DatasetRole::held_out);
  std::size_t flips = 0;
  for (std::size_t i = 0; i < a.size(); ++i) flips += a[i].label != b[i].label;
  EXPECT_EQ(flips, 100u);
}

TEST(Cli, RunReportContents) {
  const auto doc = load_document(study_dir() / "report.json");
  EXPECT_EQ(doc["manifest"]["command"], "run");
  EXPECT_EQ(doc["manifest"]["inputs"].size(), 3u);
  EXPECT_EQ(doc["manifest"]["inputs"][0]["sha256"].get<std::string>().size(), 64u);
  const auto report = report_from_json(doc["report"]);
  EXPECT_EQ(report.intervals.size(), 10u);
  EXPECT_TRUE(fs::exists(study_dir() / "report.csv"));
}

TEST(Cli, ValidatePassesOnSimulatedStudy) {
  const auto out = testing_support::scratch_dir("cli_validate");
  EXPECT_EQ(run_cli("--out " + out.string() + " validate --report " + in_study("report.json") + " --wild " +
                    in_study("wild.csv") + " --labels " + in_study("wild_labels.csv")),
            0);
  // an impossible bound reports a failed check
  EXPECT_EQ(run_cli("--out " + out.string() + " validate --bound -1.5 --report " + in_study("report.json") +
                    " --wild " + in_study("wild.csv") + " --labels " + in_study("wild_labels.csv")),
            4);
}

TEST(Cli, RcCurveOnConstantReportGivesItsHeight) {
  const auto out = testing_support::scratch_dir("cli_rc");
  auto doc = load_document(study_dir() / "report.json");
  for (auto& iv : doc["report"]["intervals"])
    if (iv["evaluated"].get<bool>()) iv["sudo"] = -0.42;
  write_file_atomic(out / "flat.json", doc.dump());
  ASSERT_EQ(run_cli("--out " + out.string() + " rc-curve --report " + (out / "flat.json").string() + " --wild " +
                    in_study("wild.csv")),
            0);
  const auto rc = load_document(out / "rc_curve.json");
  EXPECT_NEAR(rc["rc_curve"]["aurcc"].get<double>(), 0.42, 1e-12);
  EXPECT_TRUE(fs::exists(out / "rc_curve.csv"));
  EXPECT_TRUE(fs::exists(out / "rc_curve.svg"));
}

TEST(Cli, SurvivalMediansOrderedByRisk) {
  const auto out = testing_support::scratch_dir("cli_survival");
  ASSERT_EQ(run_cli("--out " + out.string() + " survival --wild " + in_study("wild.csv") + " --report " +
                    in_study("report.json")),
            0);
  const auto doc = load_document(out / "survival.json");
  const auto& strata = doc["survival"]["strata"];
  ASSERT_EQ(strata.size(), 3u);
  const double low = strata[0]["curve"]["median"].get<double>();
  const double high = strata[2]["curve"]["median"].get<double>();
  EXPECT_GT(low, high);
}

TEST(Cli, ExitCodes) {
  const auto out = testing_support::scratch_dir("cli_errors");
  EXPECT_EQ(run_cli(""), 2);
  EXPECT_EQ(run_cli("frobnicate"), 2);
  EXPECT_EQ(run_cli("--config /nonexistent.json simulate"), 2);
  std::ofstream(out / "bad.json") << "{\"sead\": 1}";
  EXPECT_EQ(run_cli("--config " + (out / "bad.json").string() + " --out " + out.string() + " simulate"), 2);
  EXPECT_EQ(run_cli("--out " + out.string() + " run --wild /nonexistent.csv --train " + in_study("train.csv") +
                    " --held-out " + in_study("held_out.csv")),
            3);
  EXPECT_EQ(run_cli("--out " + out.string() + " run --m 100000 --wild " + in_study("wild.csv") + " --train " +
                    in_study("train.csv") + " --held-out " + in_study("held_out.csv")),
            3);
  EXPECT_FALSE(fs::exists(out / "report.json"));
  EXPECT_EQ(run_cli("--out " + out.string() + " run --metric f1 --wild " + in_study("wild.csv") + " --train " +
                    in_study("train.csv") + " --held-out " + in_study("held_out.csv")),
            2);
}

TEST(Cli, FeaturizeText) {
  const auto out = testing_support::scratch_dir("cli_featurize");
  std::ofstream(out / "docs.csv") << "id,p,text,label\na,0.2,\"the cat sat\",0\nb,0.7,\"the dog ran\",1\nc,0.4,\"a cat ran\",0\n";
  ASSERT_EQ(run_cli("--out " + out.string() + " featurize --role train --input " + (out / "docs.csv").string()), 0);
  const auto ds = load(out / "features.csv", DatasetRole::train);
  EXPECT_EQ(ds.size(), 3u);
  EXPECT_EQ(ds.dim(), 6u);
  EXPECT_TRUE(fs::exists(out / "vocabulary.json"));
}
