#include <fstream>
#include <iostream>

#include "commands.hpp"
#include "maat/errors.hpp"
#include "maat/harness.hpp"
#include "maat/report_io.hpp"
#include "util.hpp"

namespace maat::cli {

int run_detect(const DetectOptions& options) {
  RunRecorder recorder("detect", options.raw_args);
  recorder.set_seed(options.seed);
  recorder.add_input(options.train_vectors);
  recorder.add_input(options.train_snapshot);
  recorder.add_input(options.test_vectors);
  recorder.add_input(options.test_truth);

  const StrategySpec spec = strategy_spec_from_shorthand(options.strategy);
  if (spec.kind != StrategySpec::Kind::Fixed) {
    throw UsageError("detect needs a concrete strategy, not '" + spec.name +
                     "'");
  }

  std::vector<ClassifierKind> kinds;
  if (options.classifier == "all") {
    kinds = {ClassifierKind::Knn, ClassifierKind::RandomForestClassifier,
             ClassifierKind::Gnb, ClassifierKind::LinearSvm};
  } else {
    kinds = {classifier_kind_from_string(options.classifier)};
  }

  const Date snapshot_date =
      options.train_snapshot_date.empty()
          ? infer_snapshot_date(options.train_snapshot)
          : Date::parse(options.train_snapshot_date);

  const VectorTable train = load_vector_csv(options.train_vectors);
  const Snapshot train_reports =
      load_snapshot(options.train_snapshot, snapshot_date);
  const VectorTable test = load_vector_csv(options.test_vectors);
  const GroundTruth test_truth = load_ground_truth(options.test_truth);

  ClassifierSpec classifier_spec;
  classifier_spec.seed = options.seed;

  const auto results = downstream_experiment(
      train, train_reports, *spec.strategy, test, test_truth,
      classifier_spec, kinds);

  nlohmann::ordered_json object;
  object["strategy"] = spec.name;
  object["train_snapshot_date"] = snapshot_date.to_string();
  auto array = nlohmann::ordered_json::array();
  for (const auto& result : results) {
    nlohmann::ordered_json entry;
    entry["classifier"] = std::string(to_string(result.kind));
    entry["hyperparam"] = result.hyperparam;
    entry["cv_accuracy"] = result.cv_accuracy;
    entry["tp"] = result.counts.tp;
    entry["fp"] = result.counts.fp;
    entry["tn"] = result.counts.tn;
    entry["fn"] = result.counts.fn;
    entry["mcc"] = result.mcc;
    entry["accuracy"] = result.accuracy;
    array.push_back(std::move(entry));
  }
  object["results"] = std::move(array);

  guard_overwrite(options.out_json, options.force);
  std::ofstream out(options.out_json, std::ios::binary);
  if (!out) throw IoError("cannot write " + options.out_json);
  out << object.dump(2) << '\n';

  recorder.add_output(options.out_json);
  recorder.write_beside(options.out_json);

  std::cout << "detect: strategy '" << spec.name << "', "
            << results.size() << " classifier(s) -> " << options.out_json
            << '\n';
  return 0;
}

}  // namespace maat::cli
