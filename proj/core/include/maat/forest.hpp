#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "maat/confusion.hpp"
#include "maat/label.hpp"
#include "maat/matrix.hpp"
#include "maat/rng.hpp"

namespace maat {

/// Gini impurity of a two-class count pair: 1 - (n0/n)^2 - (n1/n)^2.
/// Throws ValidationError on empty counts.
double gini(std::int64_t n_benign, std::int64_t n_malicious);

/// Binary CART node. feature_index < 0 marks a leaf. Split nodes also carry
/// their class counts and impurity so trees can be rendered and audited.
struct TreeNode {
  int feature_index = -1;
  double threshold = 0.0;
  std::int64_t n_benign = 0;
  std::int64_t n_malicious = 0;
  double node_gini = 0.0;
  Label prediction = Label::Benign;  // majority class; ties break to Benign
  std::unique_ptr<TreeNode> left;
  std::unique_ptr<TreeNode> right;

  bool is_leaf() const { return feature_index < 0; }
  std::int64_t samples() const { return n_benign + n_malicious; }
};

struct TreeFitOptions {
  std::optional<int> max_depth;          // absent = unbounded
  int min_samples_split = 2;
  std::optional<int> feature_subsample;  // per node; absent = all features
};

class DecisionTree {
 public:
  DecisionTree() = default;
  DecisionTree(std::unique_ptr<TreeNode> root, std::optional<int> max_depth,
               std::vector<double> importances);

  Label predict(std::span<const double> x) const;

  const TreeNode& root() const { return *root_; }
  std::optional<int> max_depth() const { return max_depth_; }

  /// Per-feature (node_samples/total) * impurity-decrease sums, normalized
  /// to 1 whenever at least one split exists; all zero otherwise.
  const std::vector<double>& importances() const { return importances_; }

  int depth() const;

 private:
  std::unique_ptr<TreeNode> root_;
  std::optional<int> max_depth_;
  std::vector<double> importances_;
};

/// Grows a CART tree. Candidate thresholds are midpoints between consecutive
/// distinct sorted feature values; the split maximizing the weighted Gini
/// decrease wins, ties resolving to the lowest feature index and then the
/// lowest threshold. Recursion stops at purity, the depth bound, node size
/// below min_samples_split, or no strictly positive decrease. Values <=
/// threshold descend left.
DecisionTree fit_tree(const DataView& X, std::span<const Label> y,
                      const TreeFitOptions& options, Rng& rng);

struct ForestHyperparams {
  int n_estimators = 100;
  std::optional<int> max_depth;
};

/// Bagged CART trees. Tree i draws its bootstrap sample and per-node feature
/// subsets (ceil(sqrt(d)) features) from a stream derived from (seed, i), so
/// fitting is reproducible and schedule-independent.
class RandomForest {
 public:
  RandomForest() = default;
  RandomForest(std::vector<DecisionTree> trees, ForestHyperparams params,
               std::uint64_t seed);

  /// Majority vote across trees; ties break to Benign.
  Label predict(std::span<const double> x) const;
  std::vector<Label> predict_rows(const DataView& X) const;

  const std::vector<DecisionTree>& trees() const { return trees_; }
  const ForestHyperparams& params() const { return params_; }
  std::uint64_t seed() const { return seed_; }

 private:
  std::vector<DecisionTree> trees_;
  ForestHyperparams params_;
  std::uint64_t seed_ = 0;
};

RandomForest fit_forest(const DataView& X, std::span<const Label> y,
                        int n_estimators, std::optional<int> max_depth,
                        std::uint64_t seed);

/// Seeded shuffle, contiguous unstratified folds, one forest per fold trained
/// on the complement; returns the mean fold accuracy (TP+TN)/(P+N).
double cross_validate(const DataView& X, std::span<const Label> y,
                      int n_estimators, std::optional<int> max_depth,
                      int folds, std::uint64_t seed);

struct GridSearchConfig {
  std::vector<std::optional<int>> max_depth_grid{1, 4, 10, std::nullopt};
  int folds = 10;
  int n_estimators = 100;
  std::uint64_t seed = 0;
};

struct GridSearchResult {
  std::optional<int> best_max_depth;
  double best_cv_accuracy = 0.0;
  std::vector<double> cv_accuracies;  // one per grid entry, grid order
  RandomForest forest;                // refit on all data with the winner
};

/// Exact-mean comparison over the depth grid; ties break to the earliest
/// grid position.
GridSearchResult grid_search(const DataView& X, std::span<const Label> y,
                             const GridSearchConfig& config);

/// Shared fold partition: seeded shuffle of [0, n) then contiguous slices.
std::vector<std::vector<std::size_t>> make_folds(std::size_t n, int folds,
                                                 std::uint64_t seed);

enum class RenderFormat { Text, Dot };

/// Human-readable tree rendering carrying feature names, thresholds, sample
/// counts, class counts, and gini per node.
std::string render_tree(const DecisionTree& tree,
                        std::span<const std::string> feature_names,
                        RenderFormat format);

}  // namespace maat
