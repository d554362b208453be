#include <iostream>

#include "commands.hpp"
#include "maat/errors.hpp"
#include "maat/harness.hpp"
#include "maat/report_io.hpp"
#include "util.hpp"

namespace maat::cli {

int run_train(const TrainOptions& options) {
  RunRecorder recorder("train", options.raw_args);
  recorder.set_seed(options.seed);
  recorder.add_corpus_input(options.corpus_manifest);
  recorder.add_input(options.truth_path);

  TimeSeriesCorpus corpus = load_corpus(options.corpus_manifest);
  const GroundTruth truth = load_ground_truth(options.truth_path);

  if (!options.until_date.empty()) {
    const Date until = Date::parse(options.until_date);
    std::erase_if(corpus.snapshots,
                  [until](const Snapshot& s) { return s.date > until; });
    if (corpus.snapshots.empty()) {
      throw ValidationError("--until " + options.until_date +
                            " excludes every snapshot in the corpus");
    }
  }

  GridSearchConfig config;
  config.folds = options.folds;
  config.n_estimators = options.n_estimators;
  config.max_depth_grid = parse_depth_grid(options.depth_grid);
  config.seed = options.seed;

  TrainingCutoffs cutoffs;
  cutoffs.correctness = options.correctness_cutoff;
  cutoffs.certainty = options.certainty_cutoff;
  cutoffs.importance = options.importance_cutoff;

  const FeatureSetKind kind =
      feature_set_kind_from_string(options.features);

  guard_overwrite(options.out_model, options.force);
  const ForestStrategy strategy =
      train_strategy(corpus, truth, kind, config, cutoffs);
  strategy.save(options.out_model);

  recorder.add_output(options.out_model);
  recorder.write_beside(options.out_model);

  const auto& params = strategy.forest().params();
  std::cout << "trained " << to_string(kind) << " strategy over "
            << corpus.snapshots.size() << " snapshots: "
            << strategy.schema().size() << " features, "
            << params.n_estimators << " trees, max_depth=";
  if (params.max_depth) {
    std::cout << *params.max_depth;
  } else {
    std::cout << "none";
  }
  std::cout << " -> " << options.out_model << '\n';
  return 0;
}

}  // namespace maat::cli
