#pragma once

// Pseudo-label discrepancy engine.
//
// For each probability interval and repeat, m wild records are sampled once
// and reused by every pseudo-label arm. Arm c trains a probe to separate the
// sample (pseudo-labelled c) from m ground-truth training records of the
// opposite class(es), and scores it on the held-out set. The discrepancy of
// an interval is mean_perf(arm 0) - mean_perf(arm 1) in the binary case and
// max - min over arms in the multi-class case.
//
// Tasks (interval x repeat x arm) are independent. Every random draw comes
// from a substream keyed by (master_seed, interval, repeat), so reports do
// not depend on thread count or scheduling.

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <exception>
#include <limits>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include "sudo/dataset.hpp"
#include "sudo/error.hpp"
#include "sudo/metrics.hpp"
#include "sudo/probes.hpp"
#include "sudo/random.hpp"

namespace sudo {

// Half-open intervals (b[i], b[i+1]] over strictly increasing boundaries.
struct IntervalScheme {
  std::vector<double> boundaries;

  static IntervalScheme equal_width(double lo, double hi, std::size_t bins) {
    if (bins < 1) throw ConfigError("interval count must be at least 1");
    if (!(lo < hi)) throw ConfigError("interval range must satisfy lo < hi");
    IntervalScheme s;
    s.boundaries.reserve(bins + 1);
    for (std::size_t i = 0; i <= bins; ++i)
      s.boundaries.push_back(i == bins ? hi : lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(bins));
    s.validate();
    return s;
  }

  std::size_t size() const { return boundaries.size() < 2 ? 0 : boundaries.size() - 1; }
  double lower(std::size_t i) const { return boundaries[i]; }
  double upper(std::size_t i) const { return boundaries[i + 1]; }

  void validate() const {
    if (boundaries.size() < 2) throw ConfigError("interval scheme needs at least two boundaries");
    for (std::size_t i = 0; i < boundaries.size(); ++i) {
      if (!(boundaries[i] >= 0.0 && boundaries[i] <= 1.0))
        throw ConfigError("interval boundaries must lie in [0,1]");
      if (i > 0 && !(boundaries[i] > boundaries[i - 1]))
        throw ConfigError("interval boundaries must be strictly increasing");
    }
  }

  std::optional<std::size_t> locate(double p) const {
    if (!(p > boundaries.front() && p <= boundaries.back())) return std::nullopt;
    auto it = std::lower_bound(boundaries.begin(), boundaries.end(), p);
    return static_cast<std::size_t>(it - boundaries.begin()) - 1;
  }
};

struct Discretization {
  std::vector<std::vector<std::size_t>> members;  // record indices per interval, in record order
  std::size_t excluded = 0;                        // records outside the scheme's range

  std::vector<std::size_t> counts() const {
    std::vector<std::size_t> out;
    for (const auto& m : members) out.push_back(m.size());
    return out;
  }
};

inline Discretization discretize(const Dataset& wild, const IntervalScheme& scheme) {
  scheme.validate();
  Discretization d;
  d.members.resize(scheme.size());
  for (std::size_t i = 0; i < wild.size(); ++i) {
    if (auto bin = scheme.locate(wild[i].p)) d.members[*bin].push_back(i);
    else ++d.excluded;
  }
  return d;
}

// Auto (nullopt) picks the smallest non-empty count. A requested m must fit
// every non-empty interval since sampling is without replacement.
inline std::size_t resolve_sample_size(std::span<const std::size_t> counts, std::optional<std::size_t> requested) {
  std::optional<std::size_t> smallest;
  std::size_t smallest_at = 0;
  for (std::size_t i = 0; i < counts.size(); ++i) {
    if (counts[i] == 0) continue;
    if (!smallest || counts[i] < *smallest) {
      smallest = counts[i];
      smallest_at = i;
    }
  }
  if (!smallest) throw DataError("no interval contains any records");
  if (!requested) return *smallest;
  if (*requested < 1) throw ConfigError("sample size m must be at least 1");
  if (*requested > *smallest)
    throw DataError("requested m = " + std::to_string(*requested) + " exceeds interval " +
                    std::to_string(smallest_at) + " which holds only " + std::to_string(*smallest) + " records");
  return *requested;
}

struct SudoRunConfig {
  IntervalScheme intervals = IntervalScheme::equal_width(0.0, 1.0, 10);
  std::optional<std::size_t> m;  // nullopt: auto
  std::size_t k = 5;
  ProbeSpec probe;
  MetricKind metric = MetricKind::auc;
  double decision_threshold = kDefaultDecisionThreshold;
  std::uint64_t master_seed = 0;
  double tau = 0.0;
  std::size_t min_interval_count = 2;
  std::size_t threads = 1;

  void validate() const {
    intervals.validate();
    probe.validate();
    if (k < 1) throw ConfigError("k must be at least 1");
    if (m && *m < 1) throw ConfigError("m must be at least 1");
    if (!(tau >= 0.0)) throw ConfigError("tau must be non-negative");
    if (!(decision_threshold >= 0.0 && decision_threshold <= 1.0))
      throw ConfigError("decision threshold must lie in [0,1]");
  }
};

struct IntervalReport {
  std::size_t index = 0;
  double lower = 0.0;
  double upper = 0.0;
  std::size_t wild_count = 0;
  std::size_t sampled = 0;
  bool evaluated = false;
  std::string note;
  std::vector<std::vector<double>> performance;      // [arm][repeat]
  std::vector<double> mean_performance;              // [arm]
  std::vector<std::vector<std::string>> sampled_ids;  // [repeat], shared by all arms
  double sudo = 0.0;
  int majority_class = -1;
  bool reliable = false;
};

struct SudoReport {
  std::size_t num_classes = 2;
  std::size_t m = 0;
  std::size_t k = 0;
  std::size_t excluded = 0;
  MetricKind metric = MetricKind::auc;
  double tau = 0.0;
  std::vector<IntervalReport> intervals;
  std::vector<std::string> warnings;

  std::vector<const IntervalReport*> evaluated() const {
    std::vector<const IntervalReport*> out;
    for (const auto& iv : intervals)
      if (iv.evaluated) out.push_back(&iv);
    return out;
  }
  std::vector<double> sudo_values() const {
    std::vector<double> out;
    for (const auto& iv : intervals)
      if (iv.evaluated) out.push_back(iv.sudo);
    return out;
  }
};

// ---------------------------------------------------------------------------

// Shared read-only state for arm tasks. num_classes == 0 selects the binary
// formulation (probe predicts the original class 1); num_classes >= 2 selects
// one-vs-rest arms over classes 0..num_classes-1.
class ArmContext {
 public:
  ArmContext(const Dataset& wild, const Dataset& train, const Dataset& held_out, const SudoRunConfig& cfg,
             std::size_t num_classes)
      : wild_(wild), train_(train), cfg_(cfg), multiclass_(num_classes >= 2) {
    if (wild.role() != DatasetRole::wild) throw DataError("first dataset must have role wild");
    if (train.role() != DatasetRole::train) throw DataError("training dataset must have role train");
    if (held_out.role() != DatasetRole::held_out) throw DataError("held-out dataset must have role held_out");
    if (train.dim() != wild.dim() || held_out.dim() != wild.dim())
      throw DataError("wild, train and held-out feature dimensions differ");
    arms_ = multiclass_ ? num_classes : 2;
    held_features_ = held_out.features();
    const auto train_labels = train.labels();
    const auto held_labels = held_out.labels();
    pools_.resize(arms_);
    eval_labels_.resize(arms_);
    for (std::size_t a = 0; a < arms_; ++a) {
      const int cls = static_cast<int>(a);
      for (std::size_t i = 0; i < train_labels.size(); ++i) {
        const int l = train_labels[i];
        const bool opposite = multiclass_ ? (l != cls && l < static_cast<int>(arms_)) : (l == 1 - cls);
        if (opposite) pools_[a].push_back(i);
      }
      eval_labels_[a].reserve(held_labels.size());
      for (int l : held_labels) {
        if (multiclass_) {
          eval_labels_[a].push_back(l == cls ? 1 : 0);
        } else {
          if (l != 0 && l != 1) throw DataError("binary run requires held-out labels in {0,1}");
          eval_labels_[a].push_back(l);
        }
      }
    }
    if (multiclass_) {
      for (std::size_t a = 0; a < arms_; ++a) {
        const bool in_train = std::find(train_labels.begin(), train_labels.end(), static_cast<int>(a)) != train_labels.end();
        const bool in_held = std::find(held_labels.begin(), held_labels.end(), static_cast<int>(a)) != held_labels.end();
        if (!in_train) throw DataError("class " + std::to_string(a) + " missing from training data");
        if (!in_held) throw DataError("class " + std::to_string(a) + " missing from held-out data");
      }
    } else {
      const bool has0 = std::find(held_labels.begin(), held_labels.end(), 0) != held_labels.end();
      const bool has1 = std::find(held_labels.begin(), held_labels.end(), 1) != held_labels.end();
      if (!has0 || !has1) throw DataError("held-out data must contain both classes");
    }
  }

  std::size_t arms() const { return arms_; }
  bool multiclass() const { return multiclass_; }
  std::size_t pool_size(std::size_t arm) const { return pools_[arm].size(); }

  struct Outcome {
    double performance = 0.0;
    std::vector<std::size_t> wild_indices;  // the shared pseudo-labelled sample
    std::vector<std::size_t> train_indices;
  };

  Outcome run(std::span<const std::size_t> members, std::size_t interval, std::size_t repeat, std::size_t arm,
              std::size_t m) const {
    Engine eng = make_engine(derive_seed(cfg_.master_seed, {interval, repeat}));
    Outcome out;
    for (auto j : sample_without_replacement(eng, members.size(), m)) out.wild_indices.push_back(members[j]);
    const auto& pool = pools_[arm];
    if (pool.size() < m)
      throw DataError("interval " + std::to_string(interval) + ": only " + std::to_string(pool.size()) +
                      " opposite-class training records for pseudo-label " + std::to_string(arm) + ", need " +
                      std::to_string(m));
    for (auto j : sample_without_replacement(eng, pool.size(), m)) out.train_indices.push_back(pool[j]);

    FeatureMatrix x(2 * m, wild_.dim());
    std::vector<int> y(2 * m);
    const int pseudo = multiclass_ ? 1 : static_cast<int>(arm);
    for (std::size_t i = 0; i < m; ++i) {
      const auto& f = wild_[out.wild_indices[i]].features;
      std::copy(f.begin(), f.end(), x.row(i).begin());
      y[i] = pseudo;
      const auto& g = train_[out.train_indices[i]].features;
      std::copy(g.begin(), g.end(), x.row(m + i).begin());
      y[m + i] = 1 - pseudo;
    }
    ProbeSpec spec = cfg_.probe;
    spec.seed = derive_seed(cfg_.master_seed, {interval, repeat, 0x70726F6265ULL});
    const auto probe = train_probe(spec, x, y);
    const auto scores = probe.score_all(held_features_);
    out.performance = evaluate_metric(cfg_.metric, scores, eval_labels_[arm], cfg_.decision_threshold);
    return out;
  }

 private:
  const Dataset& wild_;
  const Dataset& train_;
  const SudoRunConfig& cfg_;
  bool multiclass_;
  std::size_t arms_ = 2;
  FeatureMatrix held_features_;
  std::vector<std::vector<std::size_t>> pools_;
  std::vector<std::vector<int>> eval_labels_;
};

// Runs fn(i) for i in [0, n) on up to `threads` workers. Output is the
// caller's responsibility; the first failing index (lowest) is rethrown.
template <typename Fn>
void parallel_for(std::size_t n, std::size_t threads, Fn&& fn) {
  std::vector<std::exception_ptr> errors(n);
  const std::size_t workers = std::max<std::size_t>(1, std::min(threads, n));
  auto body = [&](std::atomic<std::size_t>& next) {
    for (std::size_t i = next++; i < n; i = next++) {
      try {
        fn(i);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  std::atomic<std::size_t> next{0};
  if (workers == 1) {
    body(next);
  } else {
    std::vector<std::jthread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) pool.emplace_back([&] { body(next); });
  }
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

namespace detail {

inline void finalize_interval(IntervalReport& iv, bool multiclass, double tau) {
  iv.mean_performance.clear();
  for (const auto& arm : iv.performance) {
    double s = 0.0;
    for (double v : arm) s += v;
    iv.mean_performance.push_back(s / static_cast<double>(arm.size()));
  }
  const auto& mp = iv.mean_performance;
  if (multiclass) {
    const auto [lo, hi] = std::minmax_element(mp.begin(), mp.end());
    iv.sudo = *hi - *lo;
    iv.majority_class = static_cast<int>(std::max_element(mp.begin(), mp.end()) - mp.begin());
  } else {
    iv.sudo = mp[0] - mp[1];
    iv.majority_class = iv.sudo > 0.0 ? 0 : 1;
  }
  iv.reliable = std::fabs(iv.sudo) >= tau;
}

struct Job {
  std::size_t slot;     // position in the report's interval list
  std::size_t repeat;
  std::size_t arm;
};

inline SudoReport run_engine(const Dataset& wild, const Dataset& train, const Dataset& held_out,
                             const SudoRunConfig& cfg, std::size_t num_classes) {
  cfg.validate();
  const ArmContext ctx(wild, train, held_out, cfg, num_classes);
  const auto disc = discretize(wild, cfg.intervals);

  SudoReport report;
  report.num_classes = ctx.arms();
  report.k = cfg.k;
  report.metric = cfg.metric;
  report.tau = cfg.tau;
  report.excluded = disc.excluded;
  if (disc.excluded > 0)
    report.warnings.push_back(std::to_string(disc.excluded) + " wild records fall outside the interval range");

  const std::size_t minimum = std::max<std::size_t>(2, cfg.min_interval_count);
  std::vector<std::size_t> eligible_counts;
  for (std::size_t i = 0; i < cfg.intervals.size(); ++i) {
    IntervalReport iv;
    iv.index = i;
    iv.lower = cfg.intervals.lower(i);
    iv.upper = cfg.intervals.upper(i);
    iv.wild_count = disc.members[i].size();
    iv.evaluated = iv.wild_count >= minimum;
    if (!iv.evaluated) {
      iv.note = "skipped: " + std::to_string(iv.wild_count) + " records, minimum " + std::to_string(minimum);
      report.warnings.push_back("interval " + std::to_string(i) + " " + iv.note);
    } else {
      eligible_counts.push_back(iv.wild_count);
    }
    report.intervals.push_back(std::move(iv));
  }
  if (eligible_counts.empty()) throw DataError("no interval holds enough wild records to evaluate");
  report.m = resolve_sample_size(eligible_counts, cfg.m);
  const std::size_t m = report.m;
  for (auto& iv : report.intervals) {
    if (!iv.evaluated) continue;
    iv.sampled = m;
    if (2 * m < iv.wild_count)
      report.warnings.push_back("interval " + std::to_string(iv.index) + ": m = " + std::to_string(m) +
                                " samples less than 50% of its " + std::to_string(iv.wild_count) + " records");
  }
  for (std::size_t a = 0; a < ctx.arms(); ++a)
    if (ctx.pool_size(a) < m)
      throw DataError("only " + std::to_string(ctx.pool_size(a)) + " training records opposite pseudo-label " +
                      std::to_string(a) + ", need m = " + std::to_string(m));

  std::vector<Job> jobs;
  for (std::size_t s = 0; s < report.intervals.size(); ++s) {
    auto& iv = report.intervals[s];
    if (!iv.evaluated) continue;
    iv.performance.assign(ctx.arms(), std::vector<double>(cfg.k, 0.0));
    iv.sampled_ids.assign(cfg.k, {});
    for (std::size_t r = 0; r < cfg.k; ++r)
      for (std::size_t a = 0; a < ctx.arms(); ++a) jobs.push_back({s, r, a});
  }

  std::vector<ArmContext::Outcome> outcomes(jobs.size());
  parallel_for(jobs.size(), cfg.threads, [&](std::size_t j) {
    const auto& job = jobs[j];
    const auto& iv = report.intervals[job.slot];
    outcomes[j] = ctx.run(disc.members[iv.index], iv.index, job.repeat, job.arm, m);
  });

  for (std::size_t j = 0; j < jobs.size(); ++j) {
    const auto& job = jobs[j];
    auto& iv = report.intervals[job.slot];
    iv.performance[job.arm][job.repeat] = outcomes[j].performance;
    auto& ids = iv.sampled_ids[job.repeat];
    std::vector<std::string> these;
    for (auto w : outcomes[j].wild_indices) these.push_back(wild[w].id);
    if (job.arm == 0) ids = std::move(these);
    else if (ids != these) throw std::logic_error("pseudo-label arms drew different wild samples");
  }
  for (auto& iv : report.intervals)
    if (iv.evaluated) finalize_interval(iv, ctx.multiclass(), cfg.tau);
  return report;
}

}  // namespace detail

// Binary discrepancy report over every interval of the configured scheme.
inline SudoReport run_sudo(const Dataset& wild, const Dataset& train, const Dataset& held_out,
                           const SudoRunConfig& cfg) {
  return detail::run_engine(wild, train, held_out, cfg, 0);
}

// c one-vs-rest arms; sudo = max - min arm performance, majority = argmax.
inline SudoReport run_sudo_multiclass(const Dataset& wild, const Dataset& train, const Dataset& held_out,
                                      const SudoRunConfig& cfg, std::size_t num_classes) {
  if (num_classes < 2) throw ConfigError("multi-class run needs at least 2 classes");
  return detail::run_engine(wild, train, held_out, cfg, num_classes);
}

// One interval given its member record indices and a resolved m.
inline IntervalReport run_interval(std::size_t interval_index, std::span<const std::size_t> members,
                                   const Dataset& wild, const Dataset& train, const Dataset& held_out,
                                   const SudoRunConfig& cfg, std::size_t m) {
  cfg.validate();
  if (m < 1 || m > members.size())
    throw DataError("interval " + std::to_string(interval_index) + ": cannot sample m = " + std::to_string(m) +
                    " from " + std::to_string(members.size()) + " records");
  const ArmContext ctx(wild, train, held_out, cfg, 0);
  IntervalReport iv;
  iv.index = interval_index;
  if (interval_index < cfg.intervals.size()) {
    iv.lower = cfg.intervals.lower(interval_index);
    iv.upper = cfg.intervals.upper(interval_index);
  }
  iv.wild_count = members.size();
  iv.sampled = m;
  iv.evaluated = true;
  iv.performance.assign(2, std::vector<double>(cfg.k, 0.0));
  iv.sampled_ids.assign(cfg.k, {});
  std::vector<ArmContext::Outcome> outcomes(2 * cfg.k);
  parallel_for(outcomes.size(), cfg.threads, [&](std::size_t j) {
    outcomes[j] = ctx.run(members, interval_index, j / 2, j % 2, m);
  });
  for (std::size_t j = 0; j < outcomes.size(); ++j) {
    iv.performance[j % 2][j / 2] = outcomes[j].performance;
    if (j % 2 == 0)
      for (auto w : outcomes[j].wild_indices) iv.sampled_ids[j / 2].push_back(wild[w].id);
  }
  detail::finalize_interval(iv, false, cfg.tau);
  return iv;
}

}  // namespace sudo
