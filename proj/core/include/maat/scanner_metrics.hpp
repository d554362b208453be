#pragma once

#include <iosfwd>
#include <map>
#include <set>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "maat/report.hpp"

namespace maat {

/// Per-date correctness scores of one scanner plus their mean.
struct CorrectnessSeries {
  std::string scanner;
  std::vector<std::pair<Date, double>> points;
  double overall = 0.0;
};

/// Per-app certainty scores of one scanner plus their mean.
struct CertaintyScore {
  std::string scanner;
  std::map<std::string, double> per_app;
  double dataset_mean = 0.0;
};

struct ScannerSets {
  std::set<std::string> correct;
  std::set<std::string> stable;
  std::set<std::string> trusted;  // correct ∩ stable
};

/// Fraction of ground-truth apps the scanner labels correctly in this
/// snapshot. A NotScanned verdict counts as incorrect. Every ground-truth app
/// must be present; a missing report is an error naming the app.
double correctness_at(const Snapshot& snapshot, const GroundTruth& truth,
                      const std::string& scanner);

/// correctness_at per snapshot, restricted to the ground-truth apps present
/// in each snapshot (apps missing from a snapshot are skipped for that date).
CorrectnessSeries correctness_series(const TimeSeriesCorpus& corpus,
                                     const GroundTruth& truth,
                                     const std::string& scanner);

/// Scanners whose date-averaged correctness is >= cutoff.
std::set<std::string> correct_scanners(const TimeSeriesCorpus& corpus,
                                       const GroundTruth& truth,
                                       double cutoff = 0.90);

/// Mode frequency of the scanner's observations (Malicious / Benign /
/// NotScanned) for one app, over the snapshots containing it. In (0, 1];
/// an app seen in no snapshot is an error.
double certainty(const TimeSeriesCorpus& corpus, const std::string& scanner,
                 const std::string& app_id);

/// certainty over every app in the corpus plus the mean.
CertaintyScore certainty_score(const TimeSeriesCorpus& corpus,
                               const std::string& scanner);

/// Scanners whose mean per-app certainty is >= cutoff. A single-snapshot
/// corpus makes stability vacuous: all scanners are returned with a warning.
std::set<std::string> stable_scanners(const TimeSeriesCorpus& corpus,
                                      double cutoff = 0.90);

/// Correct and stable sets plus their intersection.
ScannerSets trusted_scanners(const TimeSeriesCorpus& corpus,
                             const GroundTruth& truth,
                             double correctness_cutoff = 0.90,
                             double certainty_cutoff = 0.90);

struct CorrectnessRow {
  std::string scanner;
  Date date;
  double correctness = 0.0;
};

/// One row per (scanner, snapshot) pair.
std::vector<CorrectnessRow> tabulate_correctness(
    const TimeSeriesCorpus& corpus, const GroundTruth& truth,
    const std::set<std::string>& scanners);

/// CSV "scanner,date,correctness".
void write_correctness_csv(std::span<const CorrectnessRow> rows,
                           std::ostream& out);
std::vector<CorrectnessRow> read_correctness_csv(std::istream& in);

/// CSV "scanner,mean_certainty".
void write_certainty_csv(std::span<const CertaintyScore> scores,
                         std::ostream& out);

/// {"correct": [...], "stable": [...], "trusted": [...]}, each array sorted.
void write_scanner_sets_json(const ScannerSets& sets, std::ostream& out);

}  // namespace maat
