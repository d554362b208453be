#pragma once

#include <filesystem>
#include <iosfwd>
#include <map>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "maat/features.hpp"
#include "maat/forest.hpp"
#include "maat/scanner_metrics.hpp"
#include "maat/strategies.hpp"

namespace maat {

/// Which feature pipeline a trained labeling strategy uses.
enum class FeatureSetKind { Naive, NaiveSelected, Engineered,
                            EngineeredSelected };

std::string_view to_string(FeatureSetKind kind);
FeatureSetKind feature_set_kind_from_string(std::string_view text);

struct TrainingCutoffs {
  double correctness = 0.90;
  double certainty = 0.90;
  double importance = 1e-5;
};

/// A trained random forest packaged as a labeling strategy: reports are
/// vectorized against the stored schema (ages relative to the request date)
/// and classified by the forest.
class ForestStrategy final : public LabelingStrategy {
 public:
  ForestStrategy(RandomForest forest, FeatureSchema schema,
                 FeatureSetKind kind, Date trained_from, Date trained_until,
                 std::string name = {});

  const std::string& name() const noexcept override { return name_; }
  Label label(const ScanReport& report, Date as_of) const override;

  const RandomForest& forest() const { return forest_; }
  const FeatureSchema& schema() const { return schema_; }
  FeatureSetKind feature_kind() const { return kind_; }
  Date trained_from() const { return trained_from_; }
  Date trained_until() const { return trained_until_; }

  /// Model file (version "maat-forest/1"): schema, hyperparams, seed, trees.
  void save(const std::filesystem::path& path) const;
  void write(std::ostream& out) const;
  static ForestStrategy load(const std::filesystem::path& path);
  static ForestStrategy read(std::istream& in);

 private:
  RandomForest forest_;
  FeatureSchema schema_;
  FeatureSetKind kind_;
  Date trained_from_;
  Date trained_until_;
  std::string name_;
};

/// Full training pipeline: trusted-scanner analysis (engineered kinds),
/// schema construction, per-snapshot vectorization of every ground-truth app
/// (ages relative to each snapshot's date), optional importance-based
/// selection, and a grid search over tree depths.
ForestStrategy train_strategy(const TimeSeriesCorpus& corpus,
                              const GroundTruth& truth, FeatureSetKind kind,
                              const GridSearchConfig& config,
                              const TrainingCutoffs& cutoffs = {});

/// Labels every report in the snapshot.
std::map<std::string, Label> apply_strategy(const LabelingStrategy& strategy,
                                            const Snapshot& snapshot,
                                            Date as_of);

struct EvalRow {
  std::string strategy;
  Date date;
  ConfusionCounts counts;
  double mcc = 0.0;
};

/// One evaluation entry: either a concrete strategy, or a per-date
/// pseudo-strategy ("bruteforce" re-tunes a count threshold on a reference
/// corpus, "best" tunes directly on the evaluation truth as an upper bound).
struct StrategySpec {
  enum class Kind { Fixed, Bruteforce, Best };
  Kind kind = Kind::Fixed;
  std::shared_ptr<const LabelingStrategy> strategy;  // Fixed only
  std::string name;
  int t_max = 60;
};

StrategySpec count_spec(int t);
StrategySpec percent_spec(double p);

/// JSON array of strategy descriptors:
///   {"kind":"count","t":4} | {"kind":"percent","p":0.5}
///   | {"kind":"subset","scanners":[...],"t":2} | {"kind":"forest","path":...}
///   | {"kind":"bruteforce"} | {"kind":"best"}
/// plus an optional "name" per entry. Relative forest paths resolve against
/// the descriptor file's directory. Unknown kinds raise UsageError.
std::vector<StrategySpec> load_strategy_specs(
    const std::filesystem::path& path);

/// "vt>=4", "vt>=50%", "drebin", "bruteforce", "best", or a path to a model
/// or descriptor file.
StrategySpec strategy_spec_from_shorthand(const std::string& text);

struct EvalOptions {
  const TimeSeriesCorpus* reference_corpus = nullptr;  // for "bruteforce"
  const GroundTruth* reference_truth = nullptr;
};

/// Evaluates every (strategy, snapshot) cell against the ground-truth apps
/// present in that snapshot. Rows are ordered strategy-major in input order,
/// then by date.
std::vector<EvalRow> timeseries_eval(std::span<const StrategySpec> strategies,
                                     const TimeSeriesCorpus& corpus,
                                     const GroundTruth& truth,
                                     const EvalOptions& options = {});

/// CSV "strategy,date,tp,fp,tn,fn,mcc".
void write_eval_csv(std::span<const EvalRow> rows, std::ostream& out);

// --- downstream detection on precomputed feature vectors ---

enum class ClassifierKind { Knn, RandomForestClassifier, Gnb, LinearSvm };

std::string_view to_string(ClassifierKind kind);
ClassifierKind classifier_kind_from_string(std::string_view text);

struct ClassifierSpec {
  std::vector<int> knn_k_grid{11, 26, 51, 101};
  std::vector<int> rf_trees_grid{25, 50, 75, 100};
  double svm_lambda = 1e-4;
  int svm_epochs = 20;
  int folds = 10;
  std::uint64_t seed = 0;
};

/// Feature vectors keyed by app id: CSV with app_id first, features after.
struct VectorTable {
  std::vector<std::string> app_ids;
  std::vector<std::string> feature_names;
  Matrix features;
};

VectorTable load_vector_csv(const std::filesystem::path& path);
VectorTable read_vector_csv(std::istream& in,
                            const std::string& origin = "<stream>");
void write_vector_csv(const VectorTable& table, std::ostream& out);

struct DownstreamResult {
  ClassifierKind kind = ClassifierKind::Knn;
  std::string hyperparam;     // e.g. "k=26" or "trees=100"
  double cv_accuracy = 0.0;   // 0 when no grid applies
  ConfusionCounts counts;
  double mcc = 0.0;
  double accuracy = 0.0;
};

/// Labels the training vectors by applying the strategy to their scan
/// reports, fits each requested classifier (grid-searched where a grid
/// exists), and scores MCC against the test ground truth.
std::vector<DownstreamResult> downstream_experiment(
    const VectorTable& train, const Snapshot& train_reports,
    const LabelingStrategy& strategy, const VectorTable& test,
    const GroundTruth& test_truth, const ClassifierSpec& spec,
    std::span<const ClassifierKind> kinds);

/// Euclidean k-nearest-neighbor vote. Distance ties break toward the lower
/// row index, vote ties toward Benign. Requires k <= |train|.
Label knn_predict(const DataView& train_X, std::span<const Label> train_y,
                  std::span<const double> x, int k);

struct GnbModel {
  double log_prior[2] = {0.0, 0.0};        // [benign, malicious]
  std::vector<double> mean[2];
  std::vector<double> variance[2];         // floored, see gnb_fit
};

/// Per-class feature means and variances; variances are floored at
/// 1e-9 * (largest per-feature variance) so constant features stay finite.
GnbModel gnb_fit(const DataView& X, std::span<const Label> y);
Label gnb_predict(const GnbModel& model, std::span<const double> x);

struct LinearSvmModel {
  std::vector<double> weights;
  double bias = 0.0;
};

/// Primal hinge loss with L2 regularization via seeded stochastic
/// subgradient descent, step 1/(lambda*t).
LinearSvmModel linear_svm_fit(const DataView& X, std::span<const Label> y,
                              double lambda, int epochs, std::uint64_t seed);

/// sign(w.x + b); 0 maps to Benign.
Label linear_svm_predict(const LinearSvmModel& model,
                         std::span<const double> x);

}  // namespace maat
