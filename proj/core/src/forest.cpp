#include "maat/forest.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <numeric>
#include <sstream>

#include "maat/errors.hpp"
#include "maat/parallel.hpp"

namespace maat {

namespace {

std::string format_double(double value) {
  char buffer[32];
  const auto result = std::to_chars(buffer, buffer + sizeof(buffer), value);
  return std::string(buffer, result.ptr);
}

struct SplitChoice {
  int feature = -1;
  double threshold = 0.0;
  double decrease = 0.0;
};

class TreeBuilder {
 public:
  TreeBuilder(const DataView& X, std::span<const Label> y,
              const TreeFitOptions& options, Rng& rng)
      : X_(X), y_(y), options_(options), rng_(rng),
        importances_(X.cols(), 0.0) {}

  std::unique_ptr<TreeNode> build(std::vector<std::uint32_t>& indices,
                                  int depth) {
    auto node = std::make_unique<TreeNode>();
    for (const std::uint32_t i : indices) {
      is_malicious(y_[i]) ? ++node->n_malicious : ++node->n_benign;
    }
    node->node_gini = gini(node->n_benign, node->n_malicious);
    node->prediction = node->n_malicious > node->n_benign ? Label::Malicious
                                                          : Label::Benign;

    const bool pure = node->n_benign == 0 || node->n_malicious == 0;
    const bool at_depth_limit =
        options_.max_depth && depth >= *options_.max_depth;
    const bool too_small =
        static_cast<int>(indices.size()) < options_.min_samples_split;
    if (pure || at_depth_limit || too_small) return node;

    const SplitChoice split = choose_split(indices, *node);
    if (split.feature < 0) return node;

    node->feature_index = split.feature;
    node->threshold = split.threshold;
    importances_[static_cast<std::size_t>(split.feature)] +=
        static_cast<double>(node->samples()) /
        static_cast<double>(y_.size()) * split.decrease;

    std::vector<std::uint32_t> left, right;
    left.reserve(indices.size());
    right.reserve(indices.size());
    for (const std::uint32_t i : indices) {
      (X_.at(i, static_cast<std::size_t>(split.feature)) <= split.threshold
           ? left
           : right)
          .push_back(i);
    }
    indices.clear();
    indices.shrink_to_fit();
    node->left = build(left, depth + 1);
    node->right = build(right, depth + 1);
    return node;
  }

  std::vector<double> normalized_importances() const {
    std::vector<double> result = importances_;
    const double sum = std::accumulate(result.begin(), result.end(), 0.0);
    if (sum > 0.0) {
      for (double& value : result) value /= sum;
    }
    return result;
  }

 private:
  // Candidate features are scanned in ascending index order and thresholds in
  // ascending value order with strict improvement, so ties resolve to the
  // lowest feature index and then the lowest threshold.
  SplitChoice choose_split(const std::vector<std::uint32_t>& indices,
                           const TreeNode& node) {
    std::vector<std::size_t> features;
    if (options_.feature_subsample &&
        static_cast<std::size_t>(*options_.feature_subsample) < X_.cols()) {
      features = rng_.sample_indices(
          X_.cols(), static_cast<std::size_t>(*options_.feature_subsample));
      std::sort(features.begin(), features.end());
    } else {
      features.resize(X_.cols());
      std::iota(features.begin(), features.end(), 0);
    }

    const double n = static_cast<double>(indices.size());
    const std::int64_t total_malicious = node.n_malicious;
    SplitChoice best;

    for (const std::size_t feature : features) {
      scratch_.clear();
      scratch_.reserve(indices.size());
      for (const std::uint32_t i : indices) {
        scratch_.emplace_back(X_.at(i, feature), y_[i]);
      }
      std::sort(scratch_.begin(), scratch_.end(),
                [](const auto& a, const auto& b) { return a.first < b.first; });

      std::int64_t left_total = 0;
      std::int64_t left_malicious = 0;
      for (std::size_t i = 0; i + 1 < scratch_.size(); ++i) {
        ++left_total;
        if (is_malicious(scratch_[i].second)) ++left_malicious;
        if (scratch_[i].first == scratch_[i + 1].first) continue;

        const std::int64_t right_total =
            static_cast<std::int64_t>(scratch_.size()) - left_total;
        const std::int64_t right_malicious = total_malicious - left_malicious;
        const double left_gini =
            gini(left_total - left_malicious, left_malicious);
        const double right_gini =
            gini(right_total - right_malicious, right_malicious);
        const double decrease =
            node.node_gini -
            (static_cast<double>(left_total) / n) * left_gini -
            (static_cast<double>(right_total) / n) * right_gini;
        if (decrease > best.decrease) {
          double threshold =
              (scratch_[i].first + scratch_[i + 1].first) / 2.0;
          // Adjacent floats can round the midpoint up to the right value;
          // fall back to the left value so <= keeps the partition intact.
          if (!(threshold < scratch_[i + 1].first)) {
            threshold = scratch_[i].first;
          }
          best = {static_cast<int>(feature), threshold, decrease};
        }
      }
    }
    return best;
  }

  const DataView& X_;
  std::span<const Label> y_;
  const TreeFitOptions& options_;
  Rng& rng_;
  std::vector<double> importances_;
  std::vector<std::pair<double, Label>> scratch_;
};

int node_depth(const TreeNode& node) {
  if (node.is_leaf()) return 0;
  return 1 + std::max(node_depth(*node.left), node_depth(*node.right));
}

void render_text(const TreeNode& node,
                 std::span<const std::string> feature_names, int indent,
                 std::string& out) {
  out.append(static_cast<std::size_t>(indent) * 2, ' ');
  if (node.is_leaf()) {
    out += "leaf prediction=";
    out += to_string(node.prediction);
  } else {
    const auto f = static_cast<std::size_t>(node.feature_index);
    out += "split ";
    out += f < feature_names.size() ? feature_names[f]
                                    : "f" + std::to_string(f);
    out += " <= " + format_double(node.threshold);
  }
  out += " samples=" + std::to_string(node.samples());
  out += " benign=" + std::to_string(node.n_benign);
  out += " malicious=" + std::to_string(node.n_malicious);
  out += " gini=" + format_double(node.node_gini);
  out += '\n';
  if (!node.is_leaf()) {
    render_text(*node.left, feature_names, indent + 1, out);
    render_text(*node.right, feature_names, indent + 1, out);
  }
}

int render_dot(const TreeNode& node,
               std::span<const std::string> feature_names, int& counter,
               std::string& out) {
  const int id = counter++;
  std::string label;
  if (node.is_leaf()) {
    label = std::string(to_string(node.prediction));
  } else {
    const auto f = static_cast<std::size_t>(node.feature_index);
    label = (f < feature_names.size() ? feature_names[f]
                                      : "f" + std::to_string(f)) +
            " <= " + format_double(node.threshold);
  }
  label += "\\nsamples=" + std::to_string(node.samples());
  label += "\\nbenign=" + std::to_string(node.n_benign) +
           " malicious=" + std::to_string(node.n_malicious);
  label += "\\ngini=" + format_double(node.node_gini);
  out += "  n" + std::to_string(id) + " [label=\"" + label + "\"];\n";
  if (!node.is_leaf()) {
    const int left = render_dot(*node.left, feature_names, counter, out);
    out += "  n" + std::to_string(id) + " -> n" + std::to_string(left) +
           " [label=\"yes\"];\n";
    const int right = render_dot(*node.right, feature_names, counter, out);
    out += "  n" + std::to_string(id) + " -> n" + std::to_string(right) +
           " [label=\"no\"];\n";
  }
  return id;
}

}  // namespace

double gini(std::int64_t n_benign, std::int64_t n_malicious) {
  const std::int64_t n = n_benign + n_malicious;
  if (n <= 0) throw ValidationError("gini of empty counts");
  const double p0 = static_cast<double>(n_benign) / static_cast<double>(n);
  const double p1 = static_cast<double>(n_malicious) / static_cast<double>(n);
  return 1.0 - p0 * p0 - p1 * p1;
}

DecisionTree::DecisionTree(std::unique_ptr<TreeNode> root,
                           std::optional<int> max_depth,
                           std::vector<double> importances)
    : root_(std::move(root)), max_depth_(max_depth),
      importances_(std::move(importances)) {}

Label DecisionTree::predict(std::span<const double> x) const {
  const TreeNode* node = root_.get();
  if (!node) throw ValidationError("predict on an empty tree");
  while (!node->is_leaf()) {
    const auto f = static_cast<std::size_t>(node->feature_index);
    if (f >= x.size()) {
      throw ValidationError("feature vector of length " +
                            std::to_string(x.size()) +
                            " too short for tree feature index " +
                            std::to_string(node->feature_index));
    }
    node = x[f] <= node->threshold ? node->left.get() : node->right.get();
  }
  return node->prediction;
}

int DecisionTree::depth() const {
  return root_ ? node_depth(*root_) : 0;
}

DecisionTree fit_tree(const DataView& X, std::span<const Label> y,
                      const TreeFitOptions& options, Rng& rng) {
  if (X.rows() == 0) throw ValidationError("fit_tree on empty data");
  if (X.rows() != y.size()) {
    throw ValidationError("fit_tree: " + std::to_string(X.rows()) +
                          " rows but " + std::to_string(y.size()) +
                          " labels");
  }
  TreeBuilder builder(X, y, options, rng);
  std::vector<std::uint32_t> indices(X.rows());
  std::iota(indices.begin(), indices.end(), 0);
  auto root = builder.build(indices, 0);
  return DecisionTree(std::move(root), options.max_depth,
                      builder.normalized_importances());
}

RandomForest::RandomForest(std::vector<DecisionTree> trees,
                           ForestHyperparams params, std::uint64_t seed)
    : trees_(std::move(trees)), params_(params), seed_(seed) {
  if (trees_.empty()) throw ValidationError("a forest needs >= 1 tree");
}

Label RandomForest::predict(std::span<const double> x) const {
  std::int64_t malicious = 0;
  for (const auto& tree : trees_) {
    if (is_malicious(tree.predict(x))) ++malicious;
  }
  const std::int64_t benign =
      static_cast<std::int64_t>(trees_.size()) - malicious;
  return malicious > benign ? Label::Malicious : Label::Benign;
}

std::vector<Label> RandomForest::predict_rows(const DataView& X) const {
  std::vector<Label> labels(X.rows(), Label::Benign);
  for (std::size_t i = 0; i < X.rows(); ++i) labels[i] = predict(X.row(i));
  return labels;
}

RandomForest fit_forest(const DataView& X, std::span<const Label> y,
                        int n_estimators, std::optional<int> max_depth,
                        std::uint64_t seed) {
  if (n_estimators < 1) throw ValidationError("n_estimators must be >= 1");
  if (X.rows() == 0) throw ValidationError("fit_forest on empty data");
  if (X.rows() != y.size()) {
    throw ValidationError("fit_forest: rows and labels differ in length");
  }

  TreeFitOptions options;
  options.max_depth = max_depth;
  options.feature_subsample = static_cast<int>(
      std::ceil(std::sqrt(static_cast<double>(X.cols()))));

  std::vector<DecisionTree> trees(static_cast<std::size_t>(n_estimators));
  parallel_for(trees.size(), [&](std::size_t t) {
    Rng rng(Rng::derive(seed, {0x7265657Bull, t}));
    std::vector<std::uint32_t> sample(X.rows());
    for (auto& index : sample) {
      index = static_cast<std::uint32_t>(rng.below(X.rows()));
    }
    std::vector<Label> sample_labels(sample.size());
    Matrix sample_rows(sample.size(), X.cols());
    for (std::size_t i = 0; i < sample.size(); ++i) {
      sample_labels[i] = y[sample[i]];
      const auto row = X.row(sample[i]);
      std::copy(row.begin(), row.end(), sample_rows.row(i).begin());
    }
    trees[t] = fit_tree(DataView(sample_rows), sample_labels, options, rng);
  });

  return RandomForest(std::move(trees),
                      ForestHyperparams{n_estimators, max_depth}, seed);
}

std::vector<std::vector<std::size_t>> make_folds(std::size_t n, int folds,
                                                 std::uint64_t seed) {
  if (folds < 2) throw ValidationError("folds must be >= 2");
  if (static_cast<std::size_t>(folds) > n) {
    throw ValidationError("folds (" + std::to_string(folds) +
                          ") exceed the number of rows (" + std::to_string(n) +
                          ")");
  }
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  Rng rng(Rng::derive(seed, {0xC4F01D5ull}));
  rng.shuffle(order);

  std::vector<std::vector<std::size_t>> result(
      static_cast<std::size_t>(folds));
  for (int f = 0; f < folds; ++f) {
    const std::size_t begin = n * static_cast<std::size_t>(f) /
                              static_cast<std::size_t>(folds);
    const std::size_t end = n * static_cast<std::size_t>(f + 1) /
                            static_cast<std::size_t>(folds);
    result[static_cast<std::size_t>(f)].assign(order.begin() + begin,
                                               order.begin() + end);
  }
  return result;
}

double cross_validate(const DataView& X, std::span<const Label> y,
                      int n_estimators, std::optional<int> max_depth,
                      int folds, std::uint64_t seed) {
  const auto partition = make_folds(X.rows(), folds, seed);
  const bool has_benign = std::any_of(y.begin(), y.end(), [](Label l) {
    return !is_malicious(l);
  });
  const bool has_malicious = std::any_of(y.begin(), y.end(), is_malicious);
  if (!has_benign || !has_malicious) {
    throw ValidationError("cross-validation needs both classes present");
  }

  double accuracy_sum = 0.0;
  for (std::size_t f = 0; f < partition.size(); ++f) {
    const auto& holdout = partition[f];
    std::vector<bool> held(X.rows(), false);
    for (const std::size_t i : holdout) held[i] = true;

    Matrix train_rows(X.rows() - holdout.size(), X.cols());
    std::vector<Label> train_labels;
    train_labels.reserve(train_rows.rows);
    std::size_t cursor = 0;
    for (std::size_t i = 0; i < X.rows(); ++i) {
      if (held[i]) continue;
      const auto row = X.row(i);
      std::copy(row.begin(), row.end(), train_rows.row(cursor++).begin());
      train_labels.push_back(y[i]);
    }

    const RandomForest forest =
        fit_forest(DataView(train_rows), train_labels, n_estimators,
                   max_depth, Rng::derive(seed, {0xF07Dull, f}));
    ConfusionCounts counts;
    for (const std::size_t i : holdout) {
      counts.record(y[i], forest.predict(X.row(i)));
    }
    accuracy_sum += accuracy(counts);
  }
  return accuracy_sum / static_cast<double>(partition.size());
}

GridSearchResult grid_search(const DataView& X, std::span<const Label> y,
                             const GridSearchConfig& config) {
  if (config.max_depth_grid.empty()) {
    throw ValidationError("grid search needs a non-empty depth grid");
  }
  GridSearchResult result;
  result.best_cv_accuracy = -1.0;
  for (const auto& depth : config.max_depth_grid) {
    const double score = cross_validate(X, y, config.n_estimators, depth,
                                        config.folds, config.seed);
    result.cv_accuracies.push_back(score);
    if (score > result.best_cv_accuracy) {
      result.best_cv_accuracy = score;
      result.best_max_depth = depth;
    }
  }
  result.forest =
      fit_forest(X, y, config.n_estimators, result.best_max_depth,
                 Rng::derive(config.seed, {0xF173Dull}));
  return result;
}

std::string render_tree(const DecisionTree& tree,
                        std::span<const std::string> feature_names,
                        RenderFormat format) {
  std::string out;
  if (format == RenderFormat::Text) {
    render_text(tree.root(), feature_names, 0, out);
    return out;
  }
  out += "digraph tree {\n  node [shape=box];\n";
  int counter = 0;
  render_dot(tree.root(), feature_names, counter, out);
  out += "}\n";
  return out;
}

}  // namespace maat
