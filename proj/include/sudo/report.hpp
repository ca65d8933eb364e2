#pragma once

// Serialization of results: JSON documents with an embedded run manifest,
// CSV sidecars, minimal SVG plots, and atomic file writes.

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"

#include "sudo/bias_audit.hpp"
#include "sudo/config.hpp"
#include "sudo/engine.hpp"
#include "sudo/error.hpp"
#include "sudo/oracle.hpp"
#include "sudo/rc_curve.hpp"
#include "sudo/survival.hpp"
#include "sudo/text.hpp"

namespace sudo {

inline constexpr const char* kToolName = "sudoeval";
inline constexpr const char* kToolVersion = "1.0.0";

struct InputDigest {
  std::string role;
  std::string path;
  std::string sha256;
};

struct RunManifest {
  std::string command;
  std::uint64_t master_seed = 0;
  Json config = Json::object();
  std::vector<InputDigest> inputs;
  std::string created_at;  // the only non-deterministic field
};

inline Json manifest_to_json(const RunManifest& m) {
  Json inputs = Json::array();
  for (const auto& in : m.inputs) inputs.push_back({{"role", in.role}, {"path", in.path}, {"sha256", in.sha256}});
  return Json{{"tool", kToolName},         {"version", kToolVersion}, {"command", m.command},
              {"master_seed", m.master_seed}, {"config", m.config},     {"inputs", inputs},
              {"created_at", m.created_at}};
}

// ---------------------------------------------------------------------------
// SudoReport

inline Json interval_to_json(const IntervalReport& iv) {
  Json j{{"index", iv.index},         {"lower", iv.lower},   {"upper", iv.upper},
         {"wild_count", iv.wild_count}, {"sampled", iv.sampled}, {"evaluated", iv.evaluated}};
  if (!iv.note.empty()) j["note"] = iv.note;
  if (iv.evaluated) {
    j["sudo"] = iv.sudo;
    j["majority_class"] = iv.majority_class;
    j["reliable"] = iv.reliable;
    j["mean_performance"] = iv.mean_performance;
    j["performance"] = iv.performance;
    j["sampled_ids"] = iv.sampled_ids;
  }
  return j;
}

inline Json report_to_json(const SudoReport& r) {
  Json intervals = Json::array();
  for (const auto& iv : r.intervals) intervals.push_back(interval_to_json(iv));
  return Json{{"num_classes", r.num_classes}, {"m", r.m},
              {"k", r.k},                     {"excluded", r.excluded},
              {"metric", std::string(to_string(r.metric))},
              {"tau", r.tau},                 {"warnings", r.warnings},
              {"intervals", intervals}};
}

inline SudoReport report_from_json(const Json& j) {
  try {
    SudoReport r;
    r.num_classes = j.at("num_classes").get<std::size_t>();
    r.m = j.at("m").get<std::size_t>();
    r.k = j.at("k").get<std::size_t>();
    r.excluded = j.at("excluded").get<std::size_t>();
    r.metric = parse_metric(j.at("metric").get<std::string>());
    r.tau = j.at("tau").get<double>();
    r.warnings = j.at("warnings").get<std::vector<std::string>>();
    for (const auto& ij : j.at("intervals")) {
      IntervalReport iv;
      iv.index = ij.at("index").get<std::size_t>();
      iv.lower = ij.at("lower").get<double>();
      iv.upper = ij.at("upper").get<double>();
      iv.wild_count = ij.at("wild_count").get<std::size_t>();
      iv.sampled = ij.at("sampled").get<std::size_t>();
      iv.evaluated = ij.at("evaluated").get<bool>();
      iv.note = ij.value("note", "");
      if (iv.evaluated) {
        iv.sudo = ij.at("sudo").get<double>();
        iv.majority_class = ij.at("majority_class").get<int>();
        iv.reliable = ij.at("reliable").get<bool>();
        iv.mean_performance = ij.at("mean_performance").get<std::vector<double>>();
        iv.performance = ij.at("performance").get<std::vector<std::vector<double>>>();
        iv.sampled_ids = ij.at("sampled_ids").get<std::vector<std::vector<std::string>>>();
      }
      r.intervals.push_back(std::move(iv));
    }
    return r;
  } catch (const nlohmann::json::exception& e) {
    throw DataError(std::string("malformed report: ") + e.what());
  }
}

inline std::string report_csv(const SudoReport& r) {
  std::ostringstream os;
  os << "interval,lower,upper,wild_count,sampled,evaluated,sudo,majority_class,reliable";
  for (std::size_t a = 0; a < r.num_classes; ++a) os << ",mean_perf_" << a;
  os << '\n';
  for (const auto& iv : r.intervals) {
    os << iv.index << ',' << text::format_double(iv.lower) << ',' << text::format_double(iv.upper) << ','
       << iv.wild_count << ',' << iv.sampled << ',' << (iv.evaluated ? 1 : 0) << ',';
    if (iv.evaluated) os << text::format_double(iv.sudo) << ',' << iv.majority_class << ',' << (iv.reliable ? 1 : 0);
    else os << ",,";
    for (std::size_t a = 0; a < r.num_classes; ++a)
      os << ',' << (iv.evaluated ? text::format_double(iv.mean_performance[a]) : std::string());
    os << '\n';
  }
  return os.str();
}

// ---------------------------------------------------------------------------
// Other results

inline Json rc_curve_to_json(const RcCurve& c, std::span<const ThresholdPair> pairs) {
  Json pts = Json::array();
  for (const auto& p : c.points) pts.push_back({{"completeness", p.completeness}, {"reliability", p.reliability}});
  Json pj = Json::array();
  for (const auto& p : pairs) pj.push_back({{"A", p.low}, {"B", p.high}});
  return Json{{"aurcc", c.aurcc}, {"K", c.pairs_evaluated}, {"points", pts}, {"pairs", pj}};
}

inline std::vector<ThresholdPair> pairs_from_json(const Json& j) {
  std::vector<ThresholdPair> out;
  try {
    for (const auto& pj : j) {
      ThresholdPair p{pj.at("A").get<std::vector<double>>(), pj.at("B").get<std::vector<double>>()};
      p.validate();
      out.push_back(std::move(p));
    }
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("malformed threshold pairs: ") + e.what());
  }
  return out;
}

inline Json bias_to_json(const BiasReport& b, const std::vector<GroupLabelCheck>* checks = nullptr) {
  Json groups = Json::array();
  for (const auto& g : b.groups) {
    Json gj{{"group", g.group}, {"wild_count", g.wild_count}, {"evaluated", g.evaluated}};
    if (!g.note.empty()) gj["note"] = g.note;
    if (g.report) gj["report"] = report_to_json(*g.report);
    groups.push_back(gj);
  }
  Json deltas = Json::array();
  for (const auto& d : b.deltas)
    deltas.push_back({{"group_a", d.group_a}, {"group_b", d.group_b}, {"intervals", d.intervals}, {"delta", d.delta}});
  Json j{{"groups", groups}, {"deltas", deltas}, {"warnings", b.warnings}};
  if (checks) {
    Json cj = Json::array();
    for (const auto& c : *checks) {
      Json e{{"group", c.group},
             {"count", c.count},
             {"tp", c.confusion.tp},
             {"fp", c.confusion.fp},
             {"tn", c.confusion.tn},
             {"fn", c.confusion.fn}};
      e["npv"] = c.npv ? Json(*c.npv) : Json(nullptr);
      e["precision"] = c.precision ? Json(*c.precision) : Json(nullptr);
      cj.push_back(e);
    }
    j["label_check"] = cj;
  }
  return j;
}

inline Json survival_curve_to_json(const SurvivalCurve& c) {
  return Json{{"times", c.times},     {"survival", c.survival}, {"at_risk", c.at_risk},
              {"events", c.events},   {"censored", c.censored},
              {"median", c.median ? Json(*c.median) : Json(nullptr)}};
}

inline Json strata_to_json(const std::vector<StratumSurvival>& strata) {
  Json out = Json::array();
  for (const auto& s : strata) {
    Json j{{"name", s.name}, {"range", s.range.str()}, {"count", s.count}};
    j["curve"] = s.curve ? survival_curve_to_json(*s.curve) : Json(nullptr);
    out.push_back(j);
  }
  return out;
}

inline Json survival_correlation_to_json(const SurvivalCorrelation& c) {
  return Json{{"rho", c.rho},
              {"intervals", c.intervals},
              {"sudo", c.sudo},
              {"median_survival", c.median_survival},
              {"excluded", c.excluded}};
}

inline Json correlation_check_to_json(const CorrelationCheck& c, const ContaminationProfile& prof) {
  Json ivs = Json::array();
  for (const auto& e : prof.intervals)
    ivs.push_back({{"lower", e.lower}, {"upper", e.upper}, {"count", e.count},
                   {"proportion_positive", e.proportion_positive}});
  return Json{{"rho", c.rho},   {"bound", c.bound},
              {"passed", c.passed}, {"sudo", c.sudo},
              {"proportion_positive", c.proportion_positive}, {"profile", ivs}};
}

// ---------------------------------------------------------------------------
// SVG

namespace detail {

inline std::string svg_open(double w, double h) {
  std::ostringstream os;
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << w << "\" height=\"" << h << "\" viewBox=\"0 0 "
     << w << ' ' << h << "\">\n"
     << "<rect x=\"40\" y=\"10\" width=\"" << (w - 50) << "\" height=\"" << (h - 50)
     << "\" fill=\"none\" stroke=\"#888\"/>\n";
  return os.str();
}

inline std::string svg_label(double x, double y, const std::string& s) {
  std::ostringstream os;
  os << "<text x=\"" << x << "\" y=\"" << y << "\" font-size=\"11\" font-family=\"sans-serif\">" << s
     << "</text>\n";
  return os.str();
}

}  // namespace detail

// Reliability over completeness, both axes fixed to [0,1].
inline std::string rc_curve_svg(const RcCurve& c) {
  const double w = 400, h = 300, x0 = 40, y0 = 10, pw = w - 50, ph = h - 50;
  std::ostringstream os;
  os << detail::svg_open(w, h) << "<polyline fill=\"none\" stroke=\"#1f77b4\" stroke-width=\"2\" points=\"";
  for (const auto& p : c.points)
    os << text::format_double(x0 + p.completeness * pw) << ',' << text::format_double(y0 + (1.0 - p.reliability) * ph)
       << ' ';
  os << "\"/>\n"
     << detail::svg_label(x0, h - 22, "completeness") << detail::svg_label(2, y0 + 10, "reliability")
     << detail::svg_label(x0 + pw - 90, h - 22, "AURCC " + text::format_double(c.aurcc)) << "</svg>\n";
  return os.str();
}

// Kaplan-Meier step curves, one per stratum, over [0, max time].
inline std::string survival_svg(const std::vector<StratumSurvival>& strata) {
  const double w = 400, h = 300, x0 = 40, y0 = 10, pw = w - 50, ph = h - 50;
  static const char* colors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"};
  double tmax = 0.0;
  for (const auto& s : strata)
    if (s.curve && !s.curve->times.empty()) tmax = std::max(tmax, s.curve->times.back());
  if (tmax <= 0.0) tmax = 1.0;
  std::ostringstream os;
  os << detail::svg_open(w, h);
  std::size_t n = 0;
  for (const auto& s : strata) {
    if (!s.curve) continue;
    const char* col = colors[n % 6];
    os << "<polyline fill=\"none\" stroke=\"" << col << "\" stroke-width=\"2\" points=\"";
    double prev = 1.0;
    os << text::format_double(x0) << ',' << text::format_double(y0) << ' ';
    for (std::size_t i = 0; i < s.curve->times.size(); ++i) {
      const double x = x0 + s.curve->times[i] / tmax * pw;
      os << text::format_double(x) << ',' << text::format_double(y0 + (1.0 - prev) * ph) << ' ';
      prev = s.curve->survival[i];
      os << text::format_double(x) << ',' << text::format_double(y0 + (1.0 - prev) * ph) << ' ';
    }
    os << "\"/>\n";
    os << "<text x=\"" << (x0 + pw - 120) << "\" y=\"" << (y0 + 15 + 14 * static_cast<double>(n))
       << "\" font-size=\"11\" font-family=\"sans-serif\" fill=\"" << col << "\">" << s.name << ' ' << s.range.str()
       << "</text>\n";
    ++n;
  }
  os << detail::svg_label(x0, h - 22, "time (max " + text::format_double(tmax) + ")")
     << detail::svg_label(2, y0 + 10, "S(t)") << "</svg>\n";
  return os.str();
}

// ---------------------------------------------------------------------------
// Files

// Writes to a sibling temporary file and renames it into place, so readers
// never observe a partial file.
inline void write_file_atomic(const std::filesystem::path& path, const std::string& contents) {
  const auto tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw DataError("cannot open '" + tmp + "' for writing");
    out << contents;
    out.flush();
    if (!out) {
      std::error_code ec;
      std::filesystem::remove(tmp, ec);
      throw DataError("failed writing '" + tmp + "'");
    }
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    std::filesystem::remove(tmp, ec);
    throw DataError("cannot rename into '" + path.string() + "'");
  }
}

inline std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open '" + path.string() + "'");
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

// A report document: {"manifest": ..., "<key>": payload}.
inline std::string make_document(const RunManifest& manifest, const std::string& key, const Json& payload) {
  Json doc;
  doc["manifest"] = manifest_to_json(manifest);
  doc[key] = payload;
  return doc.dump(2) + "\n";
}

inline Json load_document(const std::filesystem::path& path) {
  const auto text = read_file(path);
  try {
    return Json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw DataError(path.string() + ": " + e.what());
  }
}

}  // namespace sudo
