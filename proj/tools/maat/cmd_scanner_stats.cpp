#include <fstream>
#include <iostream>

#include "commands.hpp"
#include "maat/errors.hpp"
#include "maat/report_io.hpp"
#include "maat/scanner_metrics.hpp"
#include "util.hpp"

namespace maat::cli {

int run_scanner_stats(const ScannerStatsOptions& options) {
  RunRecorder recorder("scanner-stats", options.raw_args);
  recorder.add_corpus_input(options.corpus_manifest);
  recorder.add_input(options.truth_path);

  const TimeSeriesCorpus corpus = load_corpus(options.corpus_manifest);
  const GroundTruth truth = load_ground_truth(options.truth_path);

  const std::filesystem::path out_dir = options.out_dir;
  std::filesystem::create_directories(out_dir);
  for (const char* name :
       {"correctness.csv", "certainty.csv", "scanner_sets.json"}) {
    guard_overwrite(out_dir / name, options.force);
  }

  const ScannerSets sets = trusted_scanners(
      corpus, truth, options.correctness_cutoff, options.certainty_cutoff);
  if (sets.correct.empty()) {
    emit_warning("no scanner reaches the correctness cutoff " +
                 std::to_string(options.correctness_cutoff));
  }
  if (sets.stable.empty()) {
    emit_warning("no scanner reaches the certainty cutoff " +
                 std::to_string(options.certainty_cutoff));
  }

  const auto scanners = scanner_names(corpus);
  const auto rows = tabulate_correctness(corpus, truth, scanners);
  {
    std::ofstream out(out_dir / "correctness.csv", std::ios::binary);
    if (!out) throw IoError("cannot write " +
                            (out_dir / "correctness.csv").string());
    write_correctness_csv(rows, out);
  }
  {
    std::vector<CertaintyScore> scores;
    scores.reserve(scanners.size());
    for (const auto& scanner : scanners) {
      scores.push_back(certainty_score(corpus, scanner));
    }
    std::ofstream out(out_dir / "certainty.csv", std::ios::binary);
    if (!out) throw IoError("cannot write " +
                            (out_dir / "certainty.csv").string());
    write_certainty_csv(scores, out);
  }
  {
    std::ofstream out(out_dir / "scanner_sets.json", std::ios::binary);
    if (!out) throw IoError("cannot write " +
                            (out_dir / "scanner_sets.json").string());
    write_scanner_sets_json(sets, out);
  }

  recorder.add_output("correctness.csv");
  recorder.add_output("certainty.csv");
  recorder.add_output("scanner_sets.json");
  recorder.write_into(out_dir);

  std::cout << sets.correct.size() << " correct, " << sets.stable.size()
            << " stable, " << sets.trusted.size() << " trusted scanners\n";
  return 0;
}

}  // namespace maat::cli
