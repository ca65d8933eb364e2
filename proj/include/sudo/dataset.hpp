#pragma once

// Prediction records, role-checked dataset containers, flat-file ingestion
// (CSV canonical, JSON-lines alternate) and the hidden-label sidecar.

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <optional>
#include <ostream>
#include <span>
#include <sstream>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "json.hpp"
#include "sudo/error.hpp"
#include "sudo/matrix.hpp"
#include "sudo/text.hpp"

namespace sudo {

enum class DatasetRole { train, held_out, wild };

inline std::string_view to_string(DatasetRole role) {
  switch (role) {
    case DatasetRole::train: return "train";
    case DatasetRole::held_out: return "held_out";
    case DatasetRole::wild: return "wild";
  }
  return "unknown";
}

inline DatasetRole parse_role(std::string_view s) {
  if (s == "train") return DatasetRole::train;
  if (s == "held_out" || s == "held-out") return DatasetRole::held_out;
  if (s == "wild") return DatasetRole::wild;
  throw ConfigError("unknown dataset role '" + std::string(s) + "'");
}

struct PredictionRecord {
  std::string id;
  std::vector<double> features;
  double p = 0.0;
  std::optional<int> label;
  std::optional<std::string> group;
  std::optional<double> survival_time;
  std::optional<bool> event;
};

// Immutable after construction. A wild dataset never carries labels; hidden
// labels for oracle use travel separately in HiddenLabels.
class Dataset {
 public:
  Dataset(DatasetRole role, std::vector<PredictionRecord> records)
      : role_(role), records_(std::move(records)) {
    if (records_.empty()) throw DataError(std::string(to_string(role_)) + " dataset is empty");
    dim_ = records_.front().features.size();
    for (std::size_t i = 0; i < records_.size(); ++i) {
      const auto& r = records_[i];
      const auto where = [&] { return "record " + std::to_string(i) + " ('" + r.id + "')"; };
      if (r.features.size() != dim_)
        throw DataError(where() + ": feature dimension " + std::to_string(r.features.size()) +
                        " differs from " + std::to_string(dim_));
      if (!(r.p >= 0.0 && r.p <= 1.0)) throw DataError(where() + ": p must lie in [0,1]");
      if (r.survival_time.has_value() != r.event.has_value())
        throw DataError(where() + ": survival time and event must be given together");
      if (r.survival_time && !(*r.survival_time >= 0.0))
        throw DataError(where() + ": survival time must be non-negative");
      if (role_ == DatasetRole::wild) {
        if (r.label) throw DataError(where() + ": wild datasets may not carry labels");
      } else {
        if (!r.label) throw DataError(where() + ": label required for " + std::string(to_string(role_)));
        if (*r.label < 0) throw DataError(where() + ": label must be a non-negative class index");
      }
    }
  }

  DatasetRole role() const { return role_; }
  std::size_t size() const { return records_.size(); }
  std::size_t dim() const { return dim_; }
  std::span<const PredictionRecord> records() const { return records_; }
  const PredictionRecord& operator[](std::size_t i) const { return records_[i]; }

  bool has_groups() const {
    return std::any_of(records_.begin(), records_.end(), [](const auto& r) { return r.group.has_value(); });
  }
  bool has_survival() const {
    return std::any_of(records_.begin(), records_.end(),
                       [](const auto& r) { return r.survival_time.has_value(); });
  }

  // Labels of a train/held_out dataset.
  std::vector<int> labels() const {
    if (role_ == DatasetRole::wild) throw DataError("wild datasets expose no labels");
    std::vector<int> out;
    out.reserve(records_.size());
    for (const auto& r : records_) out.push_back(*r.label);
    return out;
  }

  std::vector<double> probabilities() const {
    std::vector<double> out;
    out.reserve(records_.size());
    for (const auto& r : records_) out.push_back(r.p);
    return out;
  }

  FeatureMatrix features() const { return features(std::span<const std::size_t>{}); }

  // Rows for the given record indices, or all rows when indices is empty.
  FeatureMatrix features(std::span<const std::size_t> indices) const {
    const std::size_t n = indices.empty() ? records_.size() : indices.size();
    FeatureMatrix m(n, dim_);
    for (std::size_t i = 0; i < n; ++i) {
      const auto& f = records_[indices.empty() ? i : indices[i]].features;
      std::copy(f.begin(), f.end(), m.row(i).begin());
    }
    return m;
  }

  Dataset subset(std::span<const std::size_t> indices) const {
    std::vector<PredictionRecord> out;
    out.reserve(indices.size());
    for (auto i : indices) out.push_back(records_.at(i));
    return Dataset(role_, std::move(out));
  }

 private:
  DatasetRole role_;
  std::vector<PredictionRecord> records_;
  std::size_t dim_ = 0;
};

// True labels of wild records keyed by record id. Only oracle code reads it.
class HiddenLabels {
 public:
  HiddenLabels() = default;
  explicit HiddenLabels(std::map<std::string, int> labels) : labels_(std::move(labels)) {}

  void set(const std::string& id, int label) { labels_[id] = label; }
  std::optional<int> find(const std::string& id) const {
    auto it = labels_.find(id);
    if (it == labels_.end()) return std::nullopt;
    return it->second;
  }
  int at(const std::string& id) const {
    auto it = labels_.find(id);
    if (it == labels_.end()) throw DataError("no hidden label for record '" + id + "'");
    return it->second;
  }
  std::size_t size() const { return labels_.size(); }
  const std::map<std::string, int>& entries() const { return labels_; }

 private:
  std::map<std::string, int> labels_;
};

// Column mapping for flat-file ingestion. Empty feature_columns means every
// column named <feature_prefix><integer>, ordered by the integer.
struct CsvSchema {
  std::string id_column = "id";
  std::string p_column = "p";
  std::string label_column = "label";
  std::string group_column = "group";
  std::string time_column = "time";
  std::string event_column = "event";
  std::string feature_prefix = "f";
  std::vector<std::string> feature_columns;
};

namespace detail {

inline std::optional<std::size_t> feature_suffix(std::string_view name, std::string_view prefix) {
  if (name.size() <= prefix.size() || name.substr(0, prefix.size()) != prefix) return std::nullopt;
  auto digits = name.substr(prefix.size());
  if (!std::all_of(digits.begin(), digits.end(), [](char c) { return c >= '0' && c <= '9'; }))
    return std::nullopt;
  auto v = text::parse_int(digits);
  if (!v) return std::nullopt;
  return static_cast<std::size_t>(*v);
}

inline bool is_jsonl_path(const std::string& path) {
  auto ends_with = [&](std::string_view suf) {
    return path.size() >= suf.size() && path.compare(path.size() - suf.size(), suf.size(), suf) == 0;
  };
  return ends_with(".jsonl") || ends_with(".ndjson");
}

inline std::optional<bool> parse_event(std::string_view s) {
  auto v = text::parse_int(s);
  if (!v || (*v != 0 && *v != 1)) return std::nullopt;
  return *v == 1;
}

}  // namespace detail

// Reads CSV records from a stream. The label column is ignored for wild
// datasets so that true labels can never reach the estimation path.
inline Dataset read_csv_dataset(std::istream& in, const CsvSchema& schema, DatasetRole role,
                                const std::string& source = "<stream>") {
  std::string line;
  std::size_t line_no = 0;
  auto fail = [&](const std::string& msg) -> DataError {
    return DataError(source + ":" + std::to_string(line_no) + ": " + msg);
  };
  if (!std::getline(in, line)) throw DataError(source + ": missing header");
  ++line_no;
  auto header = text::split_csv_line(line);
  if (!header) throw fail("malformed header");

  std::unordered_map<std::string, std::size_t> col;
  for (std::size_t i = 0; i < header->size(); ++i) col.emplace((*header)[i], i);
  auto find = [&](const std::string& name) -> std::optional<std::size_t> {
    auto it = col.find(name);
    if (it == col.end()) return std::nullopt;
    return it->second;
  };

  const auto id_col = find(schema.id_column);
  const auto p_col = find(schema.p_column);
  if (!id_col) throw fail("missing id column '" + schema.id_column + "'");
  if (!p_col) throw fail("missing p column '" + schema.p_column + "'");
  const auto label_col = role == DatasetRole::wild ? std::nullopt : find(schema.label_column);
  const auto group_col = find(schema.group_column);
  const auto time_col = find(schema.time_column);
  const auto event_col = find(schema.event_column);
  if (time_col.has_value() != event_col.has_value())
    throw fail("time and event columns must appear together");
  if (role != DatasetRole::wild && !label_col)
    throw fail("missing label column '" + schema.label_column + "' required for " +
               std::string(to_string(role)));

  std::vector<std::size_t> feature_cols;
  if (!schema.feature_columns.empty()) {
    for (const auto& name : schema.feature_columns) {
      auto c = find(name);
      if (!c) throw fail("missing feature column '" + name + "'");
      feature_cols.push_back(*c);
    }
  } else {
    std::vector<std::pair<std::size_t, std::size_t>> numbered;
    for (std::size_t i = 0; i < header->size(); ++i)
      if (auto k = detail::feature_suffix((*header)[i], schema.feature_prefix)) numbered.emplace_back(*k, i);
    std::sort(numbered.begin(), numbered.end());
    for (std::size_t j = 0; j < numbered.size(); ++j) {
      if (numbered[j].first != j) throw fail("feature columns are not numbered contiguously from 0");
      feature_cols.push_back(numbered[j].second);
    }
  }

  std::vector<PredictionRecord> records;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line == "\r") continue;
    auto cells = text::split_csv_line(line);
    if (!cells) throw fail("unterminated quoted field");
    if (cells->size() != header->size())
      throw fail("expected " + std::to_string(header->size()) + " fields, found " + std::to_string(cells->size()));
    const auto& c = *cells;
    PredictionRecord r;
    r.id = c[*id_col];
    auto p = text::parse_double(c[*p_col]);
    if (!p) throw fail("p is not a number");
    if (!(*p >= 0.0 && *p <= 1.0)) throw fail("p = " + c[*p_col] + " outside [0,1]");
    r.p = *p;
    if (label_col && !c[*label_col].empty()) {
      auto v = text::parse_int(c[*label_col]);
      if (!v || *v < 0) throw fail("label is not a non-negative integer");
      r.label = static_cast<int>(*v);
    }
    if (role != DatasetRole::wild && !r.label) throw fail("missing label");
    if (group_col && !c[*group_col].empty()) r.group = c[*group_col];
    if (time_col) {
      const bool has_t = !c[*time_col].empty();
      const bool has_e = !c[*event_col].empty();
      if (has_t != has_e) throw fail("time and event must both be present or both empty");
      if (has_t) {
        auto t = text::parse_double(c[*time_col]);
        if (!t || !(*t >= 0.0)) throw fail("time must be a non-negative number");
        auto e = detail::parse_event(c[*event_col]);
        if (!e) throw fail("event must be 1 or 0");
        r.survival_time = *t;
        r.event = *e;
      }
    }
    r.features.reserve(feature_cols.size());
    for (auto fc : feature_cols) {
      auto v = text::parse_double(c[fc]);
      if (!v) throw fail("feature column '" + (*header)[fc] + "' is not numeric");
      r.features.push_back(*v);
    }
    records.push_back(std::move(r));
  }
  if (records.empty()) throw DataError(source + ": no records");
  return Dataset(role, std::move(records));
}

inline Dataset read_jsonl_dataset(std::istream& in, const CsvSchema& schema, DatasetRole role,
                                  const std::string& source = "<stream>") {
  std::string line;
  std::size_t line_no = 0;
  std::vector<PredictionRecord> records;
  std::optional<std::size_t> dim;
  while (std::getline(in, line)) {
    ++line_no;
    auto fail = [&](const std::string& msg) {
      return DataError(source + ":" + std::to_string(line_no) + ": " + msg);
    };
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    nlohmann::json obj;
    try {
      obj = nlohmann::json::parse(line);
    } catch (const nlohmann::json::exception& e) {
      throw fail(std::string("invalid JSON: ") + e.what());
    }
    if (!obj.is_object()) throw fail("expected a JSON object");
    try {
      PredictionRecord r;
      const auto& id = obj.at(schema.id_column);
      r.id = id.is_string() ? id.get<std::string>() : id.dump();
      r.p = obj.at(schema.p_column).get<double>();
      if (!(r.p >= 0.0 && r.p <= 1.0)) throw fail("p outside [0,1]");
      if (role != DatasetRole::wild && obj.contains(schema.label_column) && !obj[schema.label_column].is_null()) {
        const int v = obj[schema.label_column].get<int>();
        if (v < 0) throw fail("label must be non-negative");
        r.label = v;
      }
      if (role != DatasetRole::wild && !r.label) throw fail("missing label");
      if (obj.contains(schema.group_column) && !obj[schema.group_column].is_null()) {
        const auto& g = obj[schema.group_column];
        r.group = g.is_string() ? g.get<std::string>() : g.dump();
      }
      const bool has_t = obj.contains(schema.time_column) && !obj[schema.time_column].is_null();
      const bool has_e = obj.contains(schema.event_column) && !obj[schema.event_column].is_null();
      if (has_t != has_e) throw fail("time and event must both be present");
      if (has_t) {
        r.survival_time = obj[schema.time_column].get<double>();
        if (!(*r.survival_time >= 0.0)) throw fail("time must be non-negative");
        const auto& e = obj[schema.event_column];
        r.event = e.is_boolean() ? e.get<bool>() : (e.get<int>() != 0);
      }
      if (obj.contains("features")) {
        r.features = obj["features"].get<std::vector<double>>();
      } else if (!schema.feature_columns.empty()) {
        for (const auto& name : schema.feature_columns) r.features.push_back(obj.at(name).get<double>());
      } else {
        for (std::size_t j = 0;; ++j) {
          auto key = schema.feature_prefix + std::to_string(j);
          if (!obj.contains(key)) break;
          r.features.push_back(obj[key].get<double>());
        }
      }
      if (dim && *dim != r.features.size()) throw fail("inconsistent feature dimension");
      dim = r.features.size();
      records.push_back(std::move(r));
    } catch (const nlohmann::json::exception& e) {
      throw fail(std::string("bad field: ") + e.what());
    }
  }
  if (records.empty()) throw DataError(source + ": no records");
  return Dataset(role, std::move(records));
}

inline Dataset load_dataset(const std::string& path, const CsvSchema& schema, DatasetRole role) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open " + path);
  if (detail::is_jsonl_path(path)) return read_jsonl_dataset(in, schema, role, path);
  return read_csv_dataset(in, schema, role, path);
}

inline Dataset load_dataset(const std::string& path, DatasetRole role) {
  return load_dataset(path, CsvSchema{}, role);
}

// Canonical CSV: id,p[,label][,group][,time,event],f0..f{d-1}; optional
// columns appear only when some record carries them.
inline void write_csv_dataset(std::ostream& out, const Dataset& ds) {
  const bool with_label = ds.role() != DatasetRole::wild;
  const bool with_group = ds.has_groups();
  const bool with_surv = ds.has_survival();
  out << "id,p";
  if (with_label) out << ",label";
  if (with_group) out << ",group";
  if (with_surv) out << ",time,event";
  for (std::size_t j = 0; j < ds.dim(); ++j) out << ",f" << j;
  out << '\n';
  for (const auto& r : ds.records()) {
    out << text::quote_csv_field(r.id) << ',' << text::format_double(r.p);
    if (with_label) out << ',' << *r.label;
    if (with_group) out << ',' << (r.group ? text::quote_csv_field(*r.group) : std::string{});
    if (with_surv) {
      if (r.survival_time)
        out << ',' << text::format_double(*r.survival_time) << ',' << (*r.event ? '1' : '0');
      else
        out << ",,";
    }
    for (double f : r.features) out << ',' << text::format_double(f);
    out << '\n';
  }
}

inline void write_jsonl_dataset(std::ostream& out, const Dataset& ds) {
  for (const auto& r : ds.records()) {
    nlohmann::ordered_json obj;
    obj["id"] = r.id;
    obj["p"] = r.p;
    if (r.label) obj["label"] = *r.label;
    if (r.group) obj["group"] = *r.group;
    if (r.survival_time) {
      obj["time"] = *r.survival_time;
      obj["event"] = *r.event ? 1 : 0;
    }
    for (std::size_t j = 0; j < r.features.size(); ++j) obj["f" + std::to_string(j)] = r.features[j];
    out << obj.dump() << '\n';
  }
}

inline std::string dataset_to_csv(const Dataset& ds) {
  std::ostringstream os;
  write_csv_dataset(os, ds);
  return os.str();
}

// Sidecar: id,label
inline void write_hidden_labels(std::ostream& out, const HiddenLabels& labels,
                                std::span<const PredictionRecord> order = {}) {
  out << "id,label\n";
  if (order.empty()) {
    for (const auto& [id, label] : labels.entries()) out << text::quote_csv_field(id) << ',' << label << '\n';
  } else {
    for (const auto& r : order) out << text::quote_csv_field(r.id) << ',' << labels.at(r.id) << '\n';
  }
}

inline HiddenLabels read_hidden_labels(std::istream& in, const std::string& source = "<stream>") {
  std::string line;
  std::size_t line_no = 0;
  if (!std::getline(in, line)) throw DataError(source + ": missing header");
  ++line_no;
  auto header = text::split_csv_line(line);
  if (!header || header->size() < 2) throw DataError(source + ": expected header id,label");
  std::optional<std::size_t> id_col, label_col;
  for (std::size_t i = 0; i < header->size(); ++i) {
    if ((*header)[i] == "id") id_col = i;
    if ((*header)[i] == "label") label_col = i;
  }
  if (!id_col || !label_col) throw DataError(source + ": expected columns id,label");
  HiddenLabels labels;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line == "\r") continue;
    auto cells = text::split_csv_line(line);
    if (!cells || cells->size() != header->size())
      throw DataError(source + ":" + std::to_string(line_no) + ": malformed row");
    auto v = text::parse_int((*cells)[*label_col]);
    if (!v || *v < 0) throw DataError(source + ":" + std::to_string(line_no) + ": bad label");
    labels.set((*cells)[*id_col], static_cast<int>(*v));
  }
  return labels;
}

inline HiddenLabels load_hidden_labels(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open " + path);
  return read_hidden_labels(in, path);
}

}  // namespace sudo
