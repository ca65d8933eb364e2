#pragma once

// Lightweight binary probe classifiers: L2-regularized logistic regression
// fit by full-batch gradient descent, and a Gini random forest.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <numeric>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "sudo/error.hpp"
#include "sudo/matrix.hpp"
#include "sudo/random.hpp"

namespace sudo {

enum class ProbeFamily { logistic_regression, random_forest };

inline std::string_view to_string(ProbeFamily f) {
  return f == ProbeFamily::logistic_regression ? "logistic_regression" : "random_forest";
}

inline ProbeFamily parse_probe_family(std::string_view s) {
  if (s == "logistic_regression" || s == "lr") return ProbeFamily::logistic_regression;
  if (s == "random_forest" || s == "rf") return ProbeFamily::random_forest;
  throw ConfigError("unknown probe family '" + std::string(s) + "'");
}

struct LogisticConfig {
  double learning_rate = 0.5;
  std::size_t epochs = 500;
  double l2 = 1e-4;
};

struct ForestConfig {
  std::size_t n_trees = 50;
  std::size_t max_depth = 4;
  // Fraction of features tried per split; 0 selects ceil(sqrt(d)).
  double feature_subsample = 0.0;
  bool bootstrap = true;
};

struct ProbeSpec {
  ProbeFamily family = ProbeFamily::logistic_regression;
  LogisticConfig lr;
  ForestConfig rf;
  std::uint64_t seed = 0;

  void validate() const {
    if (!(lr.learning_rate > 0.0)) throw ConfigError("probe learning_rate must be > 0");
    if (lr.epochs < 1) throw ConfigError("probe epochs must be >= 1");
    if (!(lr.l2 >= 0.0)) throw ConfigError("probe l2 must be >= 0");
    if (rf.n_trees < 1) throw ConfigError("probe n_trees must be >= 1");
    if (rf.max_depth < 1) throw ConfigError("probe max_depth must be >= 1");
    if (!(rf.feature_subsample >= 0.0 && rf.feature_subsample <= 1.0))
      throw ConfigError("probe feature_subsample must lie in [0,1]");
  }
};

inline double sigmoid(double z) {
  if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

// ---------------------------------------------------------------------------
// Logistic regression

struct LogisticModel {
  std::vector<double> weights;
  double bias = 0.0;

  double decision(std::span<const double> x) const {
    double z = bias;
    for (std::size_t j = 0; j < weights.size(); ++j) z += weights[j] * x[j];
    return z;
  }
  double score(std::span<const double> x) const { return sigmoid(decision(x)); }
};

// Mean log-loss plus (l2/2)*||w||^2; the bias is not penalized.
inline double logistic_loss(const LogisticModel& model, const FeatureMatrix& x, std::span<const int> y,
                            double l2) {
  double loss = 0.0;
  for (std::size_t i = 0; i < x.rows(); ++i) {
    const double z = model.decision(x.row(i));
    // log(1 + exp(-z)) for y=1, log(1 + exp(z)) for y=0, computed stably
    const double s = y[i] == 1 ? -z : z;
    loss += s > 0.0 ? s + std::log1p(std::exp(-s)) : std::log1p(std::exp(s));
  }
  loss /= static_cast<double>(x.rows());
  double norm = 0.0;
  for (double w : model.weights) norm += w * w;
  return loss + 0.5 * l2 * norm;
}

// Gradient of logistic_loss; the last entry is the bias component.
inline std::vector<double> logistic_gradient(const LogisticModel& model, const FeatureMatrix& x,
                                             std::span<const int> y, double l2) {
  const std::size_t d = x.cols();
  std::vector<double> grad(d + 1, 0.0);
  for (std::size_t i = 0; i < x.rows(); ++i) {
    const auto row = x.row(i);
    const double r = sigmoid(model.decision(row)) - static_cast<double>(y[i]);
    for (std::size_t j = 0; j < d; ++j) grad[j] += r * row[j];
    grad[d] += r;
  }
  const double inv_n = 1.0 / static_cast<double>(x.rows());
  for (auto& g : grad) g *= inv_n;
  for (std::size_t j = 0; j < d; ++j) grad[j] += l2 * model.weights[j];
  return grad;
}

inline LogisticModel fit_logistic(const FeatureMatrix& x, std::span<const int> y, const LogisticConfig& cfg) {
  LogisticModel model;
  model.weights.assign(x.cols(), 0.0);
  const std::size_t d = x.cols();
  for (std::size_t epoch = 0; epoch < cfg.epochs; ++epoch) {
    const auto grad = logistic_gradient(model, x, y, cfg.l2);
    for (std::size_t j = 0; j < d; ++j) model.weights[j] -= cfg.learning_rate * grad[j];
    model.bias -= cfg.learning_rate * grad[d];
  }
  return model;
}

// ---------------------------------------------------------------------------
// Random forest

struct TreeNode {
  // Internal node when feature >= 0: go left iff x[feature] <= threshold.
  int feature = -1;
  double threshold = 0.0;
  std::size_t left = 0;
  std::size_t right = 0;
  double value = 0.0;  // leaf: fraction of positives
};

struct DecisionTree {
  std::vector<TreeNode> nodes;  // nodes[0] is the root

  double score(std::span<const double> x) const {
    std::size_t i = 0;
    while (nodes[i].feature >= 0) {
      const auto& n = nodes[i];
      i = x[static_cast<std::size_t>(n.feature)] <= n.threshold ? n.left : n.right;
    }
    return nodes[i].value;
  }
};

struct ForestModel {
  std::vector<DecisionTree> trees;

  double score(std::span<const double> x) const {
    double s = 0.0;
    for (const auto& t : trees) s += t.score(x);
    return s / static_cast<double>(trees.size());
  }
};

struct SplitCandidate {
  int feature = -1;
  double threshold = 0.0;
  double impurity = 0.0;  // weighted Gini of the children
};

inline double gini(double pos, double total) {
  if (total <= 0.0) return 0.0;
  const double q = pos / total;
  return 2.0 * q * (1.0 - q);
}

// Best Gini split over the given features; thresholds are midpoints between
// consecutive distinct sorted values. Returns feature -1 when no split helps.
inline SplitCandidate best_split(const FeatureMatrix& x, std::span<const int> y,
                                 std::span<const std::size_t> rows, std::span<const std::size_t> features) {
  const double total = static_cast<double>(rows.size());
  double total_pos = 0.0;
  for (auto r : rows) total_pos += y[r];
  SplitCandidate best;
  best.impurity = gini(total_pos, total) * total;

  std::vector<std::size_t> order(rows.begin(), rows.end());
  for (auto f : features) {
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
      const double va = x(a, f), vb = x(b, f);
      return va < vb || (va == vb && a < b);
    });
    double left_pos = 0.0;
    for (std::size_t i = 0; i + 1 < order.size(); ++i) {
      left_pos += y[order[i]];
      const double lo = x(order[i], f), hi = x(order[i + 1], f);
      if (lo == hi) continue;
      const double nl = static_cast<double>(i + 1);
      const double nr = total - nl;
      const double imp = gini(left_pos, nl) * nl + gini(total_pos - left_pos, nr) * nr;
      if (imp < best.impurity - 1e-12) {
        best.impurity = imp;
        best.feature = static_cast<int>(f);
        best.threshold = 0.5 * (lo + hi);
      }
    }
  }
  return best;
}

namespace detail {

inline std::size_t grow_tree(DecisionTree& tree, const FeatureMatrix& x, std::span<const int> y,
                             std::vector<std::size_t> rows, std::size_t depth, const ForestConfig& cfg,
                             std::size_t n_try, Engine& eng) {
  const std::size_t id = tree.nodes.size();
  tree.nodes.emplace_back();
  double pos = 0.0;
  for (auto r : rows) pos += y[r];
  tree.nodes[id].value = rows.empty() ? 0.5 : pos / static_cast<double>(rows.size());
  const bool pure = pos == 0.0 || pos == static_cast<double>(rows.size());
  if (depth >= cfg.max_depth || rows.size() < 2 || pure) return id;

  std::vector<std::size_t> features;
  if (n_try >= x.cols()) {
    features.resize(x.cols());
    std::iota(features.begin(), features.end(), std::size_t{0});
  } else {
    features = sample_without_replacement(eng, x.cols(), n_try);
    std::sort(features.begin(), features.end());
  }
  const auto split = best_split(x, y, rows, features);
  if (split.feature < 0) return id;

  std::vector<std::size_t> left, right;
  for (auto r : rows) (x(r, static_cast<std::size_t>(split.feature)) <= split.threshold ? left : right).push_back(r);
  rows.clear();
  rows.shrink_to_fit();
  tree.nodes[id].feature = split.feature;
  tree.nodes[id].threshold = split.threshold;
  const auto l = grow_tree(tree, x, y, std::move(left), depth + 1, cfg, n_try, eng);
  const auto r = grow_tree(tree, x, y, std::move(right), depth + 1, cfg, n_try, eng);
  tree.nodes[id].left = l;
  tree.nodes[id].right = r;
  return id;
}

}  // namespace detail

inline std::size_t features_per_split(const ForestConfig& cfg, std::size_t d) {
  if (cfg.feature_subsample <= 0.0) return std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil(std::sqrt(static_cast<double>(d)))));
  return std::clamp<std::size_t>(static_cast<std::size_t>(std::ceil(cfg.feature_subsample * static_cast<double>(d))), 1, d);
}

inline ForestModel fit_forest(const FeatureMatrix& x, std::span<const int> y, const ForestConfig& cfg,
                              std::uint64_t seed) {
  ForestModel forest;
  const std::size_t n = x.rows();
  const std::size_t n_try = features_per_split(cfg, x.cols());
  for (std::size_t t = 0; t < cfg.n_trees; ++t) {
    Engine eng = make_engine(derive_seed(seed, {t}));
    std::vector<std::size_t> rows(n);
    if (cfg.bootstrap) {
      for (auto& r : rows) r = uniform_index(eng, n);
    } else {
      std::iota(rows.begin(), rows.end(), std::size_t{0});
    }
    DecisionTree tree;
    detail::grow_tree(tree, x, y, std::move(rows), 0, cfg, n_try, eng);
    forest.trees.push_back(std::move(tree));
  }
  return forest;
}

// ---------------------------------------------------------------------------

class TrainedProbe {
 public:
  TrainedProbe(LogisticModel m, std::size_t dim) : model_(std::move(m)), dim_(dim) {}
  TrainedProbe(ForestModel m, std::size_t dim) : model_(std::move(m)), dim_(dim) {}

  ProbeFamily family() const {
    return std::holds_alternative<LogisticModel>(model_) ? ProbeFamily::logistic_regression
                                                         : ProbeFamily::random_forest;
  }
  std::size_t dim() const { return dim_; }
  const LogisticModel* logistic() const { return std::get_if<LogisticModel>(&model_); }
  const ForestModel* forest() const { return std::get_if<ForestModel>(&model_); }

  double score(std::span<const double> x) const {
    if (x.size() != dim_)
      throw DataError("probe expects " + std::to_string(dim_) + " features, got " + std::to_string(x.size()));
    return std::visit([&](const auto& m) { return m.score(x); }, model_);
  }

  std::vector<double> score_all(const FeatureMatrix& x) const {
    if (x.cols() != dim_) throw DataError("probe feature dimension mismatch");
    std::vector<double> out(x.rows());
    for (std::size_t i = 0; i < x.rows(); ++i) out[i] = std::visit([&](const auto& m) { return m.score(x.row(i)); }, model_);
    return out;
  }

 private:
  std::variant<LogisticModel, ForestModel> model_;
  std::size_t dim_;
};

inline TrainedProbe train_probe(const ProbeSpec& spec, const FeatureMatrix& x, std::span<const int> y) {
  spec.validate();
  if (x.rows() != y.size()) throw DataError("train_probe: feature rows and labels differ in length");
  if (x.rows() == 0 || x.cols() == 0) throw DataError("train_probe: empty training set");
  std::size_t pos = 0;
  for (int v : y) {
    if (v != 0 && v != 1) throw DataError("train_probe: labels must be binary");
    pos += static_cast<std::size_t>(v);
  }
  if (pos == 0 || pos == y.size()) throw DataError("train_probe: training set contains a single class");
  if (spec.family == ProbeFamily::logistic_regression) return {fit_logistic(x, y, spec.lr), x.cols()};
  return {fit_forest(x, y, spec.rf, spec.seed), x.cols()};
}

}  // namespace sudo
