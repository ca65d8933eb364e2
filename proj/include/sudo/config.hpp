#pragma once

// JSON run configuration. Every section is optional; absent keys keep their
// defaults and unknown keys are rejected so that typos fail loudly.

#include <cstdint>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "json.hpp"

#include "sudo/dataset.hpp"
#include "sudo/engine.hpp"
#include "sudo/error.hpp"
#include "sudo/metrics.hpp"
#include "sudo/probes.hpp"
#include "sudo/simulation.hpp"

namespace sudo {

using Json = nlohmann::ordered_json;

namespace detail {

inline void reject_unknown(const Json& j, std::initializer_list<const char*> allowed, const std::string& where) {
  if (!j.is_object()) throw ConfigError(where + " must be a JSON object");
  const std::set<std::string> ok(allowed.begin(), allowed.end());
  for (const auto& [key, _] : j.items())
    if (!ok.count(key)) throw ConfigError("unknown key '" + key + "' in " + where);
}

template <typename T>
T get_as(const Json& j, const char* key, const std::string& where) {
  try {
    return j.at(key).get<T>();
  } catch (const nlohmann::json::exception&) {
    throw ConfigError("bad value for '" + std::string(key) + "' in " + where);
  }
}

inline std::size_t get_count(const Json& j, const char* key, const std::string& where) {
  const auto& v = j.at(key);
  if (!v.is_number_integer() || v.get<long long>() < 0)
    throw ConfigError("'" + std::string(key) + "' in " + where + " must be a non-negative integer");
  return v.get<std::size_t>();
}

}  // namespace detail

// Settings shared by every analysis subcommand.
struct AnalysisConfig {
  SudoRunConfig run;
  std::size_t num_classes = 0;  // 0: binary; >= 2: one-vs-rest arms
  CorrelationKind correlation = CorrelationKind::spearman;
  CsvSchema schema;
  SimulationConfig simulation;
};

inline Json intervals_to_json(const IntervalScheme& s) { return Json{{"boundaries", s.boundaries}}; }

inline IntervalScheme intervals_from_json(const Json& j) {
  const std::string where = "intervals";
  detail::reject_unknown(j, {"boundaries", "lo", "hi", "bins"}, where);
  IntervalScheme s;
  if (j.contains("boundaries")) {
    if (j.contains("bins")) throw ConfigError("intervals: give either boundaries or lo/hi/bins");
    s.boundaries = detail::get_as<std::vector<double>>(j, "boundaries", where);
    s.validate();
    return s;
  }
  const double lo = j.contains("lo") ? detail::get_as<double>(j, "lo", where) : 0.0;
  const double hi = j.contains("hi") ? detail::get_as<double>(j, "hi", where) : 1.0;
  const std::size_t bins = j.contains("bins") ? detail::get_count(j, "bins", where) : 10;
  return IntervalScheme::equal_width(lo, hi, bins);
}

inline Json probe_to_json(const ProbeSpec& p) {
  return Json{{"family", std::string(to_string(p.family))},
              {"learning_rate", p.lr.learning_rate},
              {"epochs", p.lr.epochs},
              {"l2", p.lr.l2},
              {"n_trees", p.rf.n_trees},
              {"max_depth", p.rf.max_depth},
              {"feature_subsample", p.rf.feature_subsample},
              {"bootstrap", p.rf.bootstrap}};
}

inline void probe_from_json(const Json& j, ProbeSpec& p) {
  const std::string where = "probe";
  detail::reject_unknown(j, {"family", "learning_rate", "epochs", "l2", "n_trees", "max_depth", "feature_subsample",
                             "bootstrap"},
                         where);
  if (j.contains("family")) p.family = parse_probe_family(detail::get_as<std::string>(j, "family", where));
  if (j.contains("learning_rate")) p.lr.learning_rate = detail::get_as<double>(j, "learning_rate", where);
  if (j.contains("epochs")) p.lr.epochs = detail::get_count(j, "epochs", where);
  if (j.contains("l2")) p.lr.l2 = detail::get_as<double>(j, "l2", where);
  if (j.contains("n_trees")) p.rf.n_trees = detail::get_count(j, "n_trees", where);
  if (j.contains("max_depth")) p.rf.max_depth = detail::get_count(j, "max_depth", where);
  if (j.contains("feature_subsample")) p.rf.feature_subsample = detail::get_as<double>(j, "feature_subsample", where);
  if (j.contains("bootstrap")) p.rf.bootstrap = detail::get_as<bool>(j, "bootstrap", where);
}

inline Json schema_to_json(const CsvSchema& s) {
  Json j{{"id", s.id_column},       {"p", s.p_column},         {"label", s.label_column},
         {"group", s.group_column}, {"time", s.time_column},   {"event", s.event_column},
         {"feature_prefix", s.feature_prefix}};
  if (!s.feature_columns.empty()) j["feature_columns"] = s.feature_columns;
  return j;
}

inline void schema_from_json(const Json& j, CsvSchema& s) {
  const std::string where = "columns";
  detail::reject_unknown(j, {"id", "p", "label", "group", "time", "event", "feature_prefix", "feature_columns"},
                         where);
  if (j.contains("id")) s.id_column = detail::get_as<std::string>(j, "id", where);
  if (j.contains("p")) s.p_column = detail::get_as<std::string>(j, "p", where);
  if (j.contains("label")) s.label_column = detail::get_as<std::string>(j, "label", where);
  if (j.contains("group")) s.group_column = detail::get_as<std::string>(j, "group", where);
  if (j.contains("time")) s.time_column = detail::get_as<std::string>(j, "time", where);
  if (j.contains("event")) s.event_column = detail::get_as<std::string>(j, "event", where);
  if (j.contains("feature_prefix")) s.feature_prefix = detail::get_as<std::string>(j, "feature_prefix", where);
  if (j.contains("feature_columns"))
    s.feature_columns = detail::get_as<std::vector<std::string>>(j, "feature_columns", where);
}

inline Json simulation_to_json(const SimulationConfig& c) {
  return Json{{"scenario", std::string(to_string(c.scenario))},
              {"n_train", c.n_train},
              {"n_held_out", c.n_held_out},
              {"wild_counts", c.resolved_wild_counts()},
              {"label_noise_rate", c.label_noise_rate}};
}

inline void simulation_from_json(const Json& j, SimulationConfig& c) {
  const std::string where = "simulation";
  detail::reject_unknown(j, {"scenario", "n_train", "n_held_out", "wild_counts", "label_noise_rate"}, where);
  if (j.contains("scenario")) c.scenario = parse_scenario(detail::get_as<std::string>(j, "scenario", where));
  if (j.contains("n_train")) c.n_train = detail::get_count(j, "n_train", where);
  if (j.contains("n_held_out")) c.n_held_out = detail::get_count(j, "n_held_out", where);
  if (j.contains("wild_counts")) c.wild_counts = detail::get_as<std::vector<std::size_t>>(j, "wild_counts", where);
  if (j.contains("label_noise_rate")) c.label_noise_rate = detail::get_as<double>(j, "label_noise_rate", where);
}

// Snapshot of everything that influences results. Thread count is left out
// on purpose: reports must not depend on it.
inline Json config_to_json(const AnalysisConfig& c) {
  Json j;
  j["seed"] = c.run.master_seed;
  j["intervals"] = intervals_to_json(c.run.intervals);
  j["m"] = c.run.m ? Json(*c.run.m) : Json("auto");
  j["k"] = c.run.k;
  j["metric"] = std::string(to_string(c.run.metric));
  j["decision_threshold"] = c.run.decision_threshold;
  j["tau"] = c.run.tau;
  j["min_interval_count"] = c.run.min_interval_count;
  j["classes"] = c.num_classes;
  j["correlation"] = c.correlation == CorrelationKind::spearman ? "spearman" : "pearson";
  j["probe"] = probe_to_json(c.run.probe);
  j["columns"] = schema_to_json(c.schema);
  j["simulation"] = simulation_to_json(c.simulation);
  return j;
}

inline void config_from_json(const Json& j, AnalysisConfig& c) {
  const std::string where = "config";
  detail::reject_unknown(j, {"seed", "threads", "intervals", "m", "k", "metric", "decision_threshold", "tau",
                             "min_interval_count", "classes", "correlation", "probe", "columns", "simulation"},
                         where);
  if (j.contains("seed")) {
    if (!j["seed"].is_number_unsigned()) throw ConfigError("seed must be a non-negative integer");
    c.run.master_seed = j["seed"].get<std::uint64_t>();
  }
  if (j.contains("threads")) c.run.threads = detail::get_count(j, "threads", where);
  if (j.contains("intervals")) c.run.intervals = intervals_from_json(j["intervals"]);
  if (j.contains("m")) {
    if (j["m"].is_string()) {
      if (j["m"].get<std::string>() != "auto") throw ConfigError("m must be a positive integer or \"auto\"");
      c.run.m.reset();
    } else {
      c.run.m = detail::get_count(j, "m", where);
    }
  }
  if (j.contains("k")) c.run.k = detail::get_count(j, "k", where);
  if (j.contains("metric")) c.run.metric = parse_metric(detail::get_as<std::string>(j, "metric", where));
  if (j.contains("decision_threshold"))
    c.run.decision_threshold = detail::get_as<double>(j, "decision_threshold", where);
  if (j.contains("tau")) c.run.tau = detail::get_as<double>(j, "tau", where);
  if (j.contains("min_interval_count")) c.run.min_interval_count = detail::get_count(j, "min_interval_count", where);
  if (j.contains("classes")) c.num_classes = detail::get_count(j, "classes", where);
  if (j.contains("correlation")) {
    const auto s = detail::get_as<std::string>(j, "correlation", where);
    if (s == "spearman") c.correlation = CorrelationKind::spearman;
    else if (s == "pearson") c.correlation = CorrelationKind::pearson;
    else throw ConfigError("correlation must be spearman or pearson");
  }
  if (j.contains("probe")) probe_from_json(j["probe"], c.run.probe);
  if (j.contains("columns")) schema_from_json(j["columns"], c.schema);
  if (j.contains("simulation")) simulation_from_json(j["simulation"], c.simulation);
  if (c.num_classes == 1) throw ConfigError("classes must be 0 (binary) or at least 2");
  c.run.validate();
}

inline Json parse_json_text(const std::string& text, const std::string& source) {
  try {
    return Json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError(source + ": " + e.what());
  }
}

}  // namespace sudo
