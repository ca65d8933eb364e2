#pragma once

// Two-dimensional Gaussian simulation: labelled source splits, shifted wild
// data under three scenarios, held-out label noise, a logistic inference
// model that scores everything, and synthetic survival outcomes.
//
// Class indices: 0 is the first (negative) class, 1 the second (positive),
// 2 the never-seen third class of the shift_third_class scenario.

#include <array>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "sudo/dataset.hpp"
#include "sudo/error.hpp"
#include "sudo/probes.hpp"
#include "sudo/random.hpp"

namespace sudo {

enum class Scenario { shift, shift_imbalanced, shift_third_class };

inline std::string_view to_string(Scenario s) {
  switch (s) {
    case Scenario::shift: return "shift";
    case Scenario::shift_imbalanced: return "shift_imbalanced";
    case Scenario::shift_third_class: return "shift_third_class";
  }
  return "unknown";
}

inline Scenario parse_scenario(std::string_view s) {
  if (s == "shift") return Scenario::shift;
  if (s == "shift_imbalanced") return Scenario::shift_imbalanced;
  if (s == "shift_third_class") return Scenario::shift_third_class;
  throw ConfigError("unknown scenario '" + std::string(s) + "'");
}

// Axis-aligned Gaussian: per-axis mean and variance.
struct Gaussian2 {
  std::array<double, 2> mean;
  std::array<double, 2> variance;
};

struct SimulationConfig {
  std::uint64_t seed = 0;
  std::size_t n_train = 500;
  std::size_t n_held_out = 200;
  Scenario scenario = Scenario::shift;
  // Per-class wild counts; empty selects the scenario default
  // (1000/1000, 4000/500, or 1000/1000/1000).
  std::vector<std::size_t> wild_counts;
  double label_noise_rate = 0.0;

  std::array<Gaussian2, 2> source = {Gaussian2{{1.0, 1.0}, {0.8, 0.8}}, Gaussian2{{2.0, 2.0}, {0.1, 0.1}}};
  std::array<Gaussian2, 3> wild = {Gaussian2{{2.0, -1.0}, {1.0, 1.0}}, Gaussian2{{3.0, 0.0}, {1.0, 1.0}},
                                   Gaussian2{{3.0, -1.0}, {1.0, 1.0}}};

  std::vector<std::size_t> resolved_wild_counts() const {
    if (!wild_counts.empty()) return wild_counts;
    switch (scenario) {
      case Scenario::shift: return {1000, 1000};
      case Scenario::shift_imbalanced: return {4000, 500};
      case Scenario::shift_third_class: return {1000, 1000, 1000};
    }
    return {};
  }

  void validate() const {
    if (n_train < 2 || n_held_out < 2) throw ConfigError("train and held-out counts must be at least 2");
    if (!(label_noise_rate >= 0.0 && label_noise_rate <= 1.0))
      throw ConfigError("label noise rate must lie in [0,1]");
    const auto counts = resolved_wild_counts();
    const std::size_t classes = scenario == Scenario::shift_third_class ? 3 : 2;
    if (counts.size() != classes)
      throw ConfigError("scenario " + std::string(to_string(scenario)) + " needs " + std::to_string(classes) +
                        " wild class counts");
    for (auto c : counts)
      if (c == 0) throw ConfigError("wild class counts must be positive");
    for (const auto& g : source)
      for (double v : g.variance)
        if (!(v > 0.0)) throw ConfigError("variances must be positive");
    for (const auto& g : wild)
      for (double v : g.variance)
        if (!(v > 0.0)) throw ConfigError("variances must be positive");
  }
};

namespace detail {

inline std::vector<double> draw_point(Engine& eng, const Gaussian2& g) {
  std::vector<double> x(2);
  for (std::size_t a = 0; a < 2; ++a) x[a] = g.mean[a] + std::sqrt(g.variance[a]) * standard_normal(eng);
  return x;
}

// Unscored records (p = 0.5) for the given per-class counts.
inline std::vector<PredictionRecord> draw_records(Engine& eng, std::span<const Gaussian2> classes,
                                                  std::span<const std::size_t> counts, std::string_view prefix) {
  std::vector<PredictionRecord> out;
  std::size_t next = 0;
  for (std::size_t c = 0; c < counts.size(); ++c) {
    for (std::size_t i = 0; i < counts[c]; ++i) {
      PredictionRecord r;
      r.id = std::string(prefix) + std::to_string(next++);
      r.features = draw_point(eng, classes[c]);
      r.p = 0.5;
      r.label = static_cast<int>(c);
      out.push_back(std::move(r));
    }
  }
  return out;
}

// Even split, odd remainder to class 0.
inline std::array<std::size_t, 2> split_counts(std::size_t n) { return {n - n / 2, n / 2}; }

}  // namespace detail

struct SourceSplits {
  Dataset train;
  Dataset held_out;
};

// Labelled train/held-out splits; p is a 0.5 placeholder until scored.
inline SourceSplits generate_source(const SimulationConfig& cfg) {
  cfg.validate();
  Engine train_eng = make_engine(derive_seed(cfg.seed, {1}));
  Engine held_eng = make_engine(derive_seed(cfg.seed, {2}));
  const auto tc = detail::split_counts(cfg.n_train);
  const auto hc = detail::split_counts(cfg.n_held_out);
  return {Dataset(DatasetRole::train, detail::draw_records(train_eng, cfg.source, tc, "train-")),
          Dataset(DatasetRole::held_out, detail::draw_records(held_eng, cfg.source, hc, "held-"))};
}

struct WildSample {
  Dataset wild;
  HiddenLabels hidden;
};

// Wild data with true labels moved into the sidecar.
inline WildSample generate_wild(const SimulationConfig& cfg) {
  cfg.validate();
  Engine eng = make_engine(derive_seed(cfg.seed, {3}));
  const auto counts = cfg.resolved_wild_counts();
  auto records = detail::draw_records(eng, std::span<const Gaussian2>(cfg.wild.data(), counts.size()), counts, "wild-");
  HiddenLabels hidden;
  for (auto& r : records) {
    hidden.set(r.id, *r.label);
    r.label.reset();
  }
  return {Dataset(DatasetRole::wild, std::move(records)), std::move(hidden)};
}

// Flips exactly round(rate * M) labels chosen uniformly without replacement.
inline Dataset inject_label_noise(const Dataset& ds, double rate, std::uint64_t seed) {
  if (!(rate >= 0.0 && rate <= 1.0)) throw ConfigError("label noise rate must lie in [0,1]");
  if (ds.role() == DatasetRole::wild) throw DataError("cannot inject label noise into an unlabelled dataset");
  std::vector<PredictionRecord> records(ds.records().begin(), ds.records().end());
  for (const auto& r : records)
    if (*r.label != 0 && *r.label != 1) throw DataError("label noise requires binary labels");
  const auto flips = static_cast<std::size_t>(std::llround(rate * static_cast<double>(records.size())));
  Engine eng = make_engine(derive_seed(seed, {4}));
  for (auto i : sample_without_replacement(eng, records.size(), flips)) records[i].label = 1 - *records[i].label;
  return Dataset(ds.role(), std::move(records));
}

// Training schedule of the simulated inference model f(x) = P(class 1 | x).
// The default runs gradient descent to practical convergence; `undertrained`
// stops after one epoch and serves as the deliberately weaker model.
struct InferenceModelConfig {
  LogisticConfig fit{0.1, 500, 0.0};

  static InferenceModelConfig undertrained() { return {LogisticConfig{0.1, 1, 0.0}}; }
};

inline LogisticModel train_inference_model(const Dataset& train, const InferenceModelConfig& cfg = {}) {
  auto labels = train.labels();
  for (int& v : labels)
    if (v != 0 && v != 1) throw DataError("inference model requires binary training labels");
  return fit_logistic(train.features(), labels, cfg.fit);
}

// Copy of the dataset with p replaced by the model's output.
inline Dataset score_dataset(const Dataset& ds, const LogisticModel& model) {
  std::vector<PredictionRecord> records(ds.records().begin(), ds.records().end());
  for (auto& r : records) r.p = model.score(r.features);
  return Dataset(ds.role(), std::move(records));
}

// Everything an end-to-end simulated experiment needs, all scored by one
// inference model trained on the (clean) train split.
struct SimulatedStudy {
  Dataset train;
  Dataset held_out;
  Dataset wild;
  HiddenLabels wild_labels;
  LogisticModel inference;
};

inline SimulatedStudy simulate_study(const SimulationConfig& cfg, const InferenceModelConfig& model_cfg = {}) {
  auto source = generate_source(cfg);
  auto wild = generate_wild(cfg);
  auto model = train_inference_model(source.train, model_cfg);
  Dataset held = score_dataset(source.held_out, model);
  if (cfg.label_noise_rate > 0.0) held = inject_label_noise(held, cfg.label_noise_rate, cfg.seed);
  return {score_dataset(source.train, model), std::move(held), score_dataset(wild.wild, model),
          std::move(wild.hidden), std::move(model)};
}

// Synthetic survival outcomes: exponential event times with a per-class rate,
// censored administratively at `follow_up` years.
struct SurvivalSimulation {
  std::vector<double> rate_by_class{0.35, 1.05, 1.05};
  double follow_up = 5.0;
  std::uint64_t seed = 0;
};

inline Dataset attach_exponential_survival(const Dataset& wild, const HiddenLabels& hidden,
                                           const SurvivalSimulation& sim) {
  Engine eng = make_engine(derive_seed(sim.seed, {5}));
  std::vector<PredictionRecord> records(wild.records().begin(), wild.records().end());
  for (auto& r : records) {
    const auto cls = static_cast<std::size_t>(hidden.at(r.id));
    if (cls >= sim.rate_by_class.size()) throw DataError("no survival rate for class " + std::to_string(cls));
    const double t = exponential(eng, sim.rate_by_class[cls]);
    r.survival_time = std::min(t, sim.follow_up);
    r.event = t <= sim.follow_up;
  }
  return Dataset(wild.role(), std::move(records));
}

}  // namespace sudo
