// sudoeval: command-line front end for simulation, discrepancy runs, RC
// curves, bias audits, survival analysis, validation and featurization.

#include <openssl/evp.h>

#include <array>
#include <chrono>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "sudo/sudo.hpp"

namespace fs = std::filesystem;
using namespace sudo;

namespace {

enum ExitCode : int { kOk = 0, kInternal = 1, kConfig = 2, kData = 3, kCheckFailed = 4 };

std::string sha256_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open '" + path + "'");
  EVP_MD_CTX* ctx = EVP_MD_CTX_new();
  if (!ctx || EVP_DigestInit_ex(ctx, EVP_sha256(), nullptr) != 1) {
    EVP_MD_CTX_free(ctx);
    throw std::runtime_error("sha256 init failed");
  }
  std::array<char, 1 << 16> buf{};
  while (in) {
    in.read(buf.data(), buf.size());
    if (in.gcount() > 0) EVP_DigestUpdate(ctx, buf.data(), static_cast<std::size_t>(in.gcount()));
  }
  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  EVP_DigestFinal_ex(ctx, md, &len);
  EVP_MD_CTX_free(ctx);
  std::string hex;
  char two[3];
  for (unsigned int i = 0; i < len; ++i) {
    std::snprintf(two, sizeof two, "%02x", md[i]);
    hex += two;
  }
  return hex;
}

std::string utc_now() {
  const auto t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

struct Globals {
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> threads;
  std::string out = ".";
};

// Overrides applied on top of the config file by run-like subcommands.
struct RunFlags {
  std::string m;
  std::optional<std::size_t> k;
  std::optional<std::size_t> bins;
  std::string metric;
  std::string probe;
  std::optional<double> tau;
  std::optional<std::size_t> classes;
};

void add_run_flags(CLI::App* sub, RunFlags& f) {
  sub->add_option("--m", f.m, "Per-interval sample size, or 'auto'");
  sub->add_option("--k", f.k, "Repeats per interval");
  sub->add_option("--bins", f.bins, "Equal-width intervals over (0,1]");
  sub->add_option("--metric", f.metric, "auc, accuracy, precision, recall or npv");
  sub->add_option("--probe", f.probe, "logistic_regression or random_forest");
  sub->add_option("--tau", f.tau, "Unreliability cutoff");
  sub->add_option("--classes", f.classes, "0 for binary, c >= 2 for one-vs-rest arms");
}

AnalysisConfig resolve_config(const Globals& g, const RunFlags* f = nullptr) {
  AnalysisConfig cfg;
  if (!g.config_path.empty()) {
    std::string text;
    try {
      text = read_file(g.config_path);
    } catch (const DataError& e) {
      throw ConfigError(e.what());
    }
    config_from_json(parse_json_text(text, g.config_path), cfg);
  }
  if (g.seed) cfg.run.master_seed = *g.seed;
  if (g.threads) cfg.run.threads = *g.threads;
  if (f) {
    if (!f->m.empty()) {
      if (f->m == "auto") cfg.run.m.reset();
      else if (auto v = text::parse_int(f->m); v && *v >= 1) cfg.run.m = static_cast<std::size_t>(*v);
      else throw ConfigError("--m must be a positive integer or 'auto'");
    }
    if (f->k) cfg.run.k = *f->k;
    if (f->bins) cfg.run.intervals = IntervalScheme::equal_width(0.0, 1.0, *f->bins);
    if (!f->metric.empty()) cfg.run.metric = parse_metric(f->metric);
    if (!f->probe.empty()) cfg.run.probe.family = parse_probe_family(f->probe);
    if (f->tau) cfg.run.tau = *f->tau;
    if (f->classes) {
      if (*f->classes == 1) throw ConfigError("--classes must be 0 or at least 2");
      cfg.num_classes = *f->classes;
    }
  }
  if (cfg.run.threads < 1) throw ConfigError("threads must be at least 1");
  cfg.run.validate();
  return cfg;
}

RunManifest make_manifest(const std::string& command, const AnalysisConfig& cfg, Json config,
                          const std::vector<std::pair<std::string, std::string>>& inputs) {
  RunManifest m;
  m.command = command;
  m.master_seed = cfg.run.master_seed;
  m.config = std::move(config);
  for (const auto& [role, path] : inputs) m.inputs.push_back({role, path, sha256_file(path)});
  m.created_at = utc_now();
  return m;
}

fs::path out_dir(const Globals& g) {
  fs::path dir(g.out);
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (!fs::is_directory(dir)) throw DataError("cannot create output directory '" + g.out + "'");
  return dir;
}

void print_warnings(const std::vector<std::string>& warnings) {
  for (const auto& w : warnings) std::cerr << "warning: " << w << '\n';
}

// ---------------------------------------------------------------------------

struct SimulateFlags {
  std::string scenario;
  std::optional<double> noise;
  std::vector<std::size_t> wild_counts;
  bool survival = false;
};

int cmd_simulate(const Globals& g, const SimulateFlags& f) {
  auto cfg = resolve_config(g);
  auto sim = cfg.simulation;
  sim.seed = cfg.run.master_seed;
  if (!f.scenario.empty()) sim.scenario = parse_scenario(f.scenario);
  if (f.noise) sim.label_noise_rate = *f.noise;
  if (!f.wild_counts.empty()) sim.wild_counts = f.wild_counts;
  sim.validate();
  auto study = simulate_study(sim);
  Dataset wild = study.wild;
  if (f.survival) {
    SurvivalSimulation ss;
    ss.seed = sim.seed;
    wild = attach_exponential_survival(wild, study.wild_labels, ss);
  }
  const auto dir = out_dir(g);
  std::ostringstream labels;
  write_hidden_labels(labels, study.wild_labels);
  write_file_atomic(dir / "train.csv", dataset_to_csv(study.train));
  write_file_atomic(dir / "held_out.csv", dataset_to_csv(study.held_out));
  write_file_atomic(dir / "wild.csv", dataset_to_csv(wild));
  write_file_atomic(dir / "wild_labels.csv", labels.str());
  std::cout << "wrote train (" << study.train.size() << "), held_out (" << study.held_out.size() << "), wild ("
            << wild.size() << ") and wild_labels to " << dir.string() << '\n';
  return kOk;
}

struct DataFlags {
  std::string wild, train, held_out, labels;
};

int cmd_run(const Globals& g, const RunFlags& rf, const DataFlags& d) {
  const auto cfg = resolve_config(g, &rf);
  const auto wild = load_dataset(d.wild, cfg.schema, DatasetRole::wild);
  const auto train = load_dataset(d.train, cfg.schema, DatasetRole::train);
  const auto held = load_dataset(d.held_out, cfg.schema, DatasetRole::held_out);
  const auto report = cfg.num_classes == 0 ? run_sudo(wild, train, held, cfg.run)
                                           : run_sudo_multiclass(wild, train, held, cfg.run, cfg.num_classes);
  print_warnings(report.warnings);
  const auto manifest = make_manifest("run", cfg, config_to_json(cfg),
                                      {{"wild", d.wild}, {"train", d.train}, {"held_out", d.held_out}});
  const auto dir = out_dir(g);
  write_file_atomic(dir / "report.json", make_document(manifest, "report", report_to_json(report)));
  write_file_atomic(dir / "report.csv", report_csv(report));
  std::cout << "m = " << report.m << ", " << report.evaluated().size() << " of " << report.intervals.size()
            << " intervals evaluated; wrote " << (dir / "report.json").string() << '\n';
  return kOk;
}

SudoReport load_report(const std::string& path) {
  const auto doc = load_document(path);
  if (!doc.contains("report")) throw DataError("'" + path + "' is not a run report");
  return report_from_json(doc["report"]);
}

int cmd_rc_curve(const Globals& g, const std::string& report_path, const std::string& wild_path,
                 const std::string& pairs_path) {
  const auto cfg = resolve_config(g);
  const auto report = load_report(report_path);
  const auto wild = load_dataset(wild_path, cfg.schema, DatasetRole::wild);
  std::vector<ThresholdPair> pairs;
  std::vector<std::pair<std::string, std::string>> inputs{{"report", report_path}, {"wild", wild_path}};
  if (pairs_path.empty()) {
    pairs = default_threshold_pairs(report);
  } else {
    std::string text;
    try {
      text = read_file(pairs_path);
    } catch (const DataError& e) {
      throw ConfigError(e.what());
    }
    pairs = pairs_from_json(parse_json_text(text, pairs_path));
    inputs.push_back({"pairs", pairs_path});
  }
  const auto curve = build_rc_curve(report, wild, pairs);
  Json snapshot{{"pairs", pairs_path.empty() ? "default" : "file"}, {"columns", schema_to_json(cfg.schema)}};
  const auto manifest = make_manifest("rc-curve", cfg, snapshot, inputs);
  const auto dir = out_dir(g);
  write_file_atomic(dir / "rc_curve.json", make_document(manifest, "rc_curve", rc_curve_to_json(curve, pairs)));
  write_file_atomic(dir / "rc_curve.csv", rc_curve_csv(curve));
  write_file_atomic(dir / "rc_curve.svg", rc_curve_svg(curve));
  std::cout << "AURCC = " << text::format_double(curve.aurcc) << " over K = " << curve.pairs_evaluated
            << " threshold pairs\n";
  return kOk;
}

int cmd_bias(const Globals& g, const RunFlags& rf, const DataFlags& d) {
  const auto cfg = resolve_config(g, &rf);
  if (cfg.num_classes != 0) throw ConfigError("bias audit runs the binary formulation only");
  const auto wild = load_dataset(d.wild, cfg.schema, DatasetRole::wild);
  const auto train = load_dataset(d.train, cfg.schema, DatasetRole::train);
  const auto held = load_dataset(d.held_out, cfg.schema, DatasetRole::held_out);
  const auto audit = run_bias_audit(wild, train, held, cfg.run);
  print_warnings(audit.warnings);
  std::vector<std::pair<std::string, std::string>> inputs{
      {"wild", d.wild}, {"train", d.train}, {"held_out", d.held_out}};
  std::optional<std::vector<GroupLabelCheck>> checks;
  if (!d.labels.empty()) {
    checks = validate_bias_with_labels(wild, load_hidden_labels(d.labels), cfg.run.decision_threshold);
    inputs.push_back({"wild_labels", d.labels});
  }
  const auto manifest = make_manifest("bias", cfg, config_to_json(cfg), inputs);
  const auto dir = out_dir(g);
  write_file_atomic(dir / "bias.json",
                    make_document(manifest, "bias", bias_to_json(audit, checks ? &*checks : nullptr)));
  for (const auto& dl : audit.deltas) {
    std::cout << dl.group_a << " - " << dl.group_b << ":";
    for (std::size_t i = 0; i < dl.delta.size(); ++i)
      std::cout << " [" << dl.intervals[i] << "] " << text::format_double(dl.delta[i]);
    std::cout << '\n';
  }
  return kOk;
}

std::vector<Stratum> parse_strata(const std::vector<std::string>& specs) {
  std::vector<Stratum> out;
  if (specs.empty()) {
    out.push_back({"low", ProbabilityRange::parse("(0,0.2]")});
    out.push_back({"mid", ProbabilityRange::parse("(0.2,0.5)")});
    out.push_back({"high", ProbabilityRange::parse("[0.5,1]")});
    return out;
  }
  for (const auto& s : specs) {
    const auto eq = s.find('=');
    if (eq == std::string::npos || eq == 0) throw ConfigError("stratum must look like name=(lo,hi]: '" + s + "'");
    out.push_back({s.substr(0, eq), ProbabilityRange::parse(s.substr(eq + 1))});
  }
  return out;
}

// "field=value" over the categorical record fields.
std::function<bool(const PredictionRecord&)> parse_where(const std::string& expr) {
  const auto eq = expr.find('=');
  if (eq == std::string::npos) throw ConfigError("--where must look like field=value");
  const auto field = expr.substr(0, eq), value = expr.substr(eq + 1);
  if (field == "group") return [value](const PredictionRecord& r) { return r.group && *r.group == value; };
  if (field == "label") {
    auto v = text::parse_int(value);
    if (!v) throw ConfigError("--where label= needs an integer");
    return [v](const PredictionRecord& r) { return r.label && *r.label == *v; };
  }
  throw ConfigError("--where supports the fields group and label");
}

int cmd_survival(const Globals& g, const std::string& wild_path, const std::string& report_path,
                 const std::vector<std::string>& strata_specs, const std::string& where) {
  const auto cfg = resolve_config(g);
  const auto strata = parse_strata(strata_specs);
  auto wild = load_dataset(wild_path, cfg.schema, DatasetRole::wild);
  if (!where.empty()) wild = filter_records(wild, parse_where(where));
  std::vector<std::string> warnings;
  const auto curves = stratified_survival(wild, strata, &warnings);
  print_warnings(warnings);
  Json payload{{"strata", strata_to_json(curves)}};
  std::vector<std::pair<std::string, std::string>> inputs{{"wild", wild_path}};
  if (!report_path.empty()) {
    const auto corr = correlate_sudo_with_survival(load_report(report_path), wild, cfg.correlation);
    payload["correlation"] = survival_correlation_to_json(corr);
    inputs.push_back({"report", report_path});
    std::cout << "rho(sudo, median survival) = " << text::format_double(corr.rho) << " over "
              << corr.intervals.size() << " intervals\n";
  }
  Json strata_json = Json::array();
  for (const auto& s : strata) strata_json.push_back(s.name + "=" + s.range.str());
  Json snapshot{{"strata", strata_json},
                {"where", where},
                {"correlation", cfg.correlation == CorrelationKind::spearman ? "spearman" : "pearson"},
                {"columns", schema_to_json(cfg.schema)}};
  const auto manifest = make_manifest("survival", cfg, snapshot, inputs);
  const auto dir = out_dir(g);
  std::ostringstream csv;
  csv << "stratum,t,S,n_at_risk,d\n";
  for (const auto& s : curves) {
    if (!s.curve) continue;
    for (std::size_t i = 0; i < s.curve->times.size(); ++i)
      csv << text::quote_csv_field(s.name) << ',' << text::format_double(s.curve->times[i]) << ','
          << text::format_double(s.curve->survival[i]) << ',' << s.curve->at_risk[i] << ',' << s.curve->events[i]
          << '\n';
  }
  write_file_atomic(dir / "survival.json", make_document(manifest, "survival", payload));
  write_file_atomic(dir / "survival.csv", csv.str());
  write_file_atomic(dir / "survival.svg", survival_svg(curves));
  for (const auto& s : curves) {
    std::cout << s.name << ' ' << s.range.str() << ": n = " << s.count << ", median = ";
    if (s.curve && s.curve->median) std::cout << text::format_double(*s.curve->median) << '\n';
    else std::cout << "not reached\n";
  }
  return kOk;
}

int cmd_validate(const Globals& g, const std::string& report_path, const std::string& wild_path,
                 const std::string& labels_path, double bound) {
  const auto cfg = resolve_config(g);
  const auto report = load_report(report_path);
  const auto wild = load_dataset(wild_path, cfg.schema, DatasetRole::wild);
  const auto hidden = load_hidden_labels(labels_path);
  IntervalScheme scheme;
  for (const auto& iv : report.intervals) scheme.boundaries.push_back(iv.lower);
  if (report.intervals.empty()) throw DataError("report has no intervals");
  scheme.boundaries.push_back(report.intervals.back().upper);
  const auto profile = contamination_profile(wild, hidden, scheme);
  const auto check = validate_correlation(report, profile, bound, cfg.correlation);
  Json snapshot{{"bound", bound},
                {"correlation", cfg.correlation == CorrelationKind::spearman ? "spearman" : "pearson"},
                {"columns", schema_to_json(cfg.schema)}};
  const auto manifest = make_manifest("validate", cfg, snapshot,
                                      {{"report", report_path}, {"wild", wild_path}, {"wild_labels", labels_path}});
  const auto dir = out_dir(g);
  write_file_atomic(dir / "validate.json", make_document(manifest, "validation", correlation_check_to_json(check, profile)));
  std::cout << "rho = " << text::format_double(check.rho) << " (bound " << text::format_double(bound) << "): "
            << (check.passed ? "PASS" : "FAIL") << '\n';
  return check.passed ? kOk : kCheckFailed;
}

Json vocabulary_to_json(const BowVocabulary& v) {
  return Json{{"tokens", v.tokens}, {"mean", v.token_mean}, {"std", v.token_std}};
}

BowVocabulary vocabulary_from_json(const Json& j) {
  try {
    BowVocabulary v;
    v.tokens = j.at("tokens").get<std::vector<std::string>>();
    v.token_mean = j.at("mean").get<std::vector<double>>();
    v.token_std = j.at("std").get<std::vector<double>>();
    if (v.token_mean.size() != v.tokens.size() || v.token_std.size() != v.tokens.size())
      throw ConfigError("vocabulary arrays differ in length");
    return v;
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("malformed vocabulary: ") + e.what());
  }
}

struct FeaturizeFlags {
  std::string input;
  std::string role = "wild";
  std::string text_column = "text";
  std::string vocab;
  std::size_t vocab_size = kDefaultVocabularySize;
};

// Input: CSV with id, p, text and optional label/group columns, one record
// per line. Output: dataset CSV with standardized bigram features.
int cmd_featurize(const Globals& g, const FeaturizeFlags& f) {
  const auto cfg = resolve_config(g);
  const auto role = parse_role(f.role);
  std::ifstream in(f.input);
  if (!in) throw DataError("cannot open '" + f.input + "'");
  std::string line;
  if (!std::getline(in, line)) throw DataError(f.input + ": empty file");
  const auto header = text::split_csv_line(line);
  if (!header) throw DataError(f.input + ":1: unterminated quote");
  auto col = [&](const std::string& name) -> std::optional<std::size_t> {
    for (std::size_t i = 0; i < header->size(); ++i)
      if ((*header)[i] == name) return i;
    return std::nullopt;
  };
  const auto id_col = col(cfg.schema.id_column), p_col = col(cfg.schema.p_column), text_col = col(f.text_column);
  const auto label_col = col(cfg.schema.label_column), group_col = col(cfg.schema.group_column);
  if (!id_col || !p_col || !text_col)
    throw DataError(f.input + ": needs columns " + cfg.schema.id_column + ", " + cfg.schema.p_column + " and " +
                    f.text_column);

  std::vector<PredictionRecord> records;
  std::vector<std::string> docs;
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    const auto fields = text::split_csv_line(line);
    const auto where = f.input + ":" + std::to_string(lineno) + ": ";
    if (!fields || fields->size() != header->size()) throw DataError(where + "malformed row");
    PredictionRecord r;
    r.id = (*fields)[*id_col];
    const auto p = text::parse_double((*fields)[*p_col]);
    if (!p) throw DataError(where + "bad probability");
    r.p = *p;
    if (label_col && role != DatasetRole::wild && !(*fields)[*label_col].empty()) {
      const auto y = text::parse_int((*fields)[*label_col]);
      if (!y) throw DataError(where + "bad label");
      r.label = static_cast<int>(*y);
    }
    if (group_col && !(*fields)[*group_col].empty()) r.group = (*fields)[*group_col];
    docs.push_back((*fields)[*text_col]);
    records.push_back(std::move(r));
  }
  if (records.empty()) throw DataError(f.input + ": no records");

  std::vector<std::pair<std::string, std::string>> inputs{{"corpus", f.input}};
  BowVocabulary vocab;
  if (f.vocab.empty()) {
    vocab = build_bow_vocabulary(docs, f.vocab_size);
  } else {
    std::string text;
    try {
      text = read_file(f.vocab);
    } catch (const DataError& e) {
      throw ConfigError(e.what());
    }
    vocab = vocabulary_from_json(parse_json_text(text, f.vocab));
    inputs.push_back({"vocabulary", f.vocab});
  }
  if (vocab.size() == 0) throw DataError("corpus has no bigrams");
  const auto x = featurize_corpus(docs, vocab);
  for (std::size_t i = 0; i < records.size(); ++i) {
    const auto row = x.row(i);
    records[i].features.assign(row.begin(), row.end());
  }
  const Dataset ds(role, std::move(records));
  Json snapshot{{"role", f.role}, {"text_column", f.text_column}, {"vocab_size", f.vocab_size},
                {"vocabulary", f.vocab.empty() ? "built" : "file"}};
  const auto manifest = make_manifest("featurize", cfg, snapshot, inputs);
  const auto dir = out_dir(g);
  write_file_atomic(dir / "features.csv", dataset_to_csv(ds));
  write_file_atomic(dir / "vocabulary.json", make_document(manifest, "vocabulary", vocabulary_to_json(vocab)));
  std::cout << "featurized " << ds.size() << " documents over " << vocab.size() << " bigrams\n";
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Label-free evaluation of model predictions via pseudo-label discrepancy"};
  app.set_version_flag("--version", std::string(kToolVersion));
  app.require_subcommand(1);

  Globals g;
  app.add_option("--config", g.config_path, "JSON config file")->check(CLI::ExistingFile);
  app.add_option("--seed", g.seed, "Master seed (overrides config)");
  app.add_option("--threads", g.threads, "Worker threads (results do not depend on it)");
  app.add_option("--out", g.out, "Output directory")->capture_default_str();

  SimulateFlags sim;
  auto* simulate = app.add_subcommand("simulate", "Write simulated train/held_out/wild CSVs and hidden labels");
  simulate->add_option("--scenario", sim.scenario, "shift, shift_imbalanced or shift_third_class");
  simulate->add_option("--noise", sim.noise, "Fraction of held-out labels to flip");
  simulate->add_option("--wild-counts", sim.wild_counts, "Per-class wild counts");
  simulate->add_flag("--survival", sim.survival, "Attach exponential survival times to wild records");

  RunFlags rf;
  DataFlags df;
  auto* run = app.add_subcommand("run", "Per-interval discrepancy report");
  run->add_option("--wild", df.wild, "Wild dataset")->required();
  run->add_option("--train", df.train, "Labelled train dataset")->required();
  run->add_option("--held-out", df.held_out, "Labelled held-out dataset")->required();
  add_run_flags(run, rf);

  std::string rc_report, rc_wild, rc_pairs;
  auto* rc = app.add_subcommand("rc-curve", "Reliability-completeness curve and AURCC from a run report");
  rc->add_option("--report", rc_report, "report.json from run")->required();
  rc->add_option("--wild", rc_wild, "Wild dataset the report was computed on")->required();
  rc->add_option("--pairs", rc_pairs, "JSON list of {\"A\": [...], \"B\": [...]} threshold pairs");

  auto* bias = app.add_subcommand("bias", "Per-group discrepancy reports and pairwise differences");
  bias->add_option("--wild", df.wild, "Wild dataset with a group column")->required();
  bias->add_option("--train", df.train, "Labelled train dataset")->required();
  bias->add_option("--held-out", df.held_out, "Labelled held-out dataset")->required();
  bias->add_option("--labels", df.labels, "Hidden wild labels for a per-group NPV check");
  add_run_flags(bias, rf);

  std::string sv_wild, sv_report, sv_where;
  std::vector<std::string> sv_strata;
  auto* survival = app.add_subcommand("survival", "Kaplan-Meier curves by probability stratum");
  survival->add_option("--wild", sv_wild, "Wild dataset with time and event columns")->required();
  survival->add_option("--report", sv_report, "Run report to correlate against median survival");
  survival->add_option("--stratum", sv_strata, "name=(lo,hi] (repeatable)");
  survival->add_option("--where", sv_where, "Pre-filter records, e.g. group=A");

  std::string va_report, va_wild, va_labels;
  double va_bound = -0.8;
  auto* validate = app.add_subcommand("validate", "Correlate a report with hidden-label contamination");
  validate->add_option("--report", va_report, "report.json from run")->required();
  validate->add_option("--wild", va_wild, "Wild dataset")->required();
  validate->add_option("--labels", va_labels, "Hidden wild labels")->required();
  validate->add_option("--bound", va_bound, "Pass iff rho <= bound")->capture_default_str();

  FeaturizeFlags ff;
  auto* featurize = app.add_subcommand("featurize", "Standardized bigram bag-of-words features from text");
  featurize->add_option("--input", ff.input, "CSV with id, p, text (and optional label, group)")->required();
  featurize->add_option("--role", ff.role, "train, held_out or wild")->capture_default_str();
  featurize->add_option("--text-column", ff.text_column, "Text column name")->capture_default_str();
  featurize->add_option("--vocab", ff.vocab, "Reuse vocabulary.json from an earlier featurize");
  featurize->add_option("--vocab-size", ff.vocab_size, "Bigrams kept")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kConfig;
  }

  try {
    if (simulate->parsed()) return cmd_simulate(g, sim);
    if (run->parsed()) return cmd_run(g, rf, df);
    if (rc->parsed()) return cmd_rc_curve(g, rc_report, rc_wild, rc_pairs);
    if (bias->parsed()) return cmd_bias(g, rf, df);
    if (survival->parsed()) return cmd_survival(g, sv_wild, sv_report, sv_strata, sv_where);
    if (validate->parsed()) return cmd_validate(g, va_report, va_wild, va_labels, va_bound);
    if (featurize->parsed()) return cmd_featurize(g, ff);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kConfig;
  } catch (const DataError& e) {
    std::cerr << "data error: " << e.what() << '\n';
    return kData;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kInternal;
  }
  return kInternal;
}
