#include <fstream>
#include <iostream>

#include "commands.hpp"
#include "maat/errors.hpp"
#include "maat/harness.hpp"
#include "maat/report_io.hpp"
#include "util.hpp"

namespace maat::cli {

int run_eval(const cli::EvalOptions& options) {
  RunRecorder recorder("eval", options.raw_args);
  recorder.add_input(options.strategies_path);
  recorder.add_corpus_input(options.corpus_manifest);
  recorder.add_input(options.truth_path);

  const auto specs = load_strategy_specs(options.strategies_path);
  const TimeSeriesCorpus corpus = load_corpus(options.corpus_manifest);
  const GroundTruth truth = load_ground_truth(options.truth_path);

  TimeSeriesCorpus reference;
  GroundTruth reference_truth;
  maat::EvalOptions eval_options;
  if (!options.ref_corpus_manifest.empty()) {
    recorder.add_corpus_input(options.ref_corpus_manifest);
    recorder.add_input(options.ref_truth_path);
    reference = load_corpus(options.ref_corpus_manifest);
    reference_truth = load_ground_truth(options.ref_truth_path);
    eval_options.reference_corpus = &reference;
    eval_options.reference_truth = &reference_truth;
  }

  const auto rows = timeseries_eval(specs, corpus, truth, eval_options);

  guard_overwrite(options.out_csv, options.force);
  std::ofstream out(options.out_csv, std::ios::binary);
  if (!out) throw IoError("cannot write " + options.out_csv);
  write_eval_csv(rows, out);

  recorder.add_output(options.out_csv);
  recorder.write_beside(options.out_csv);

  std::cout << "evaluated " << specs.size() << " strategies over "
            << corpus.snapshots.size() << " snapshots -> "
            << options.out_csv << '\n';
  return 0;
}

}  // namespace maat::cli
