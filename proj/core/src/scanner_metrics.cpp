#include "maat/scanner_metrics.hpp"

#include <algorithm>
#include <charconv>
#include <ostream>
#include <sstream>

#include <json.hpp>

#include "maat/errors.hpp"

namespace maat {

namespace {

std::string format_double(double value) {
  char buffer[32];
  const auto result =
      std::to_chars(buffer, buffer + sizeof(buffer), value);
  return std::string(buffer, result.ptr);
}

// Counts integer hits once; dividing a single pair of integers keeps scores
// independent of accumulation order.
double correctness_over(const Snapshot& snapshot,
                        const std::vector<std::pair<std::string, Label>>& apps,
                        const std::string& scanner) {
  std::int64_t correct = 0;
  for (const auto& [app_id, label] : apps) {
    const auto it = snapshot.reports.find(app_id);
    const Verdict verdict = verdict_of(it->second, scanner);
    const bool hit =
        (label == Label::Malicious && verdict == Verdict::Malicious) ||
        (label == Label::Benign && verdict == Verdict::Benign);
    if (hit) ++correct;
  }
  return static_cast<double>(correct) / static_cast<double>(apps.size());
}

std::vector<std::pair<std::string, Label>> present_apps(
    const Snapshot& snapshot, const GroundTruth& truth) {
  std::vector<std::pair<std::string, Label>> apps;
  apps.reserve(truth.labels.size());
  for (const auto& [app_id, label] : truth.labels) {
    if (snapshot.reports.contains(app_id)) apps.emplace_back(app_id, label);
  }
  return apps;
}

}  // namespace

double correctness_at(const Snapshot& snapshot, const GroundTruth& truth,
                      const std::string& scanner) {
  if (truth.labels.empty()) {
    throw ValidationError("correctness needs a non-empty ground truth");
  }
  std::vector<std::pair<std::string, Label>> apps;
  apps.reserve(truth.labels.size());
  for (const auto& [app_id, label] : truth.labels) {
    if (!snapshot.reports.contains(app_id)) {
      throw ValidationError("correctness: app " + app_id +
                            " missing from snapshot " +
                            snapshot.date.to_string());
    }
    apps.emplace_back(app_id, label);
  }
  return correctness_over(snapshot, apps, scanner);
}

CorrectnessSeries correctness_series(const TimeSeriesCorpus& corpus,
                                     const GroundTruth& truth,
                                     const std::string& scanner) {
  if (corpus.snapshots.empty()) {
    throw ValidationError("correctness needs at least one snapshot");
  }
  CorrectnessSeries series;
  series.scanner = scanner;
  double sum = 0.0;
  for (const auto& snapshot : corpus.snapshots) {
    const auto apps = present_apps(snapshot, truth);
    if (apps.empty()) {
      throw ValidationError("correctness: snapshot " +
                            snapshot.date.to_string() +
                            " contains no ground-truth apps");
    }
    const double score = correctness_over(snapshot, apps, scanner);
    series.points.emplace_back(snapshot.date, score);
    sum += score;
  }
  series.overall = sum / static_cast<double>(series.points.size());
  return series;
}

std::set<std::string> correct_scanners(const TimeSeriesCorpus& corpus,
                                       const GroundTruth& truth,
                                       double cutoff) {
  std::set<std::string> result;
  for (const auto& scanner : scanner_names(corpus)) {
    if (correctness_series(corpus, truth, scanner).overall >= cutoff) {
      result.insert(scanner);
    }
  }
  return result;
}

double certainty(const TimeSeriesCorpus& corpus, const std::string& scanner,
                 const std::string& app_id) {
  int counts[3] = {0, 0, 0};  // NotScanned, Benign, Malicious
  int observations = 0;
  for (const auto& snapshot : corpus.snapshots) {
    const auto it = snapshot.reports.find(app_id);
    if (it == snapshot.reports.end()) continue;
    ++counts[verdict_value(verdict_of(it->second, scanner)) + 1];
    ++observations;
  }
  if (observations == 0) {
    throw ValidationError("certainty: app " + app_id +
                          " appears in no snapshot");
  }
  const int mode = std::max({counts[0], counts[1], counts[2]});
  return static_cast<double>(mode) / static_cast<double>(observations);
}

CertaintyScore certainty_score(const TimeSeriesCorpus& corpus,
                               const std::string& scanner) {
  CertaintyScore score;
  score.scanner = scanner;
  double sum = 0.0;
  for (const auto& app_id : app_ids(corpus)) {
    const double value = certainty(corpus, scanner, app_id);
    score.per_app.emplace(app_id, value);
    sum += value;
  }
  if (score.per_app.empty()) {
    throw ValidationError("certainty: corpus contains no apps");
  }
  score.dataset_mean = sum / static_cast<double>(score.per_app.size());
  return score;
}

std::set<std::string> stable_scanners(const TimeSeriesCorpus& corpus,
                                      double cutoff) {
  const auto scanners = scanner_names(corpus);
  if (corpus.snapshots.size() < 2) {
    emit_warning("stability over fewer than two snapshots is vacuous; "
                 "returning all scanners");
    return scanners;
  }
  std::set<std::string> result;
  for (const auto& scanner : scanners) {
    if (certainty_score(corpus, scanner).dataset_mean >= cutoff) {
      result.insert(scanner);
    }
  }
  return result;
}

ScannerSets trusted_scanners(const TimeSeriesCorpus& corpus,
                             const GroundTruth& truth,
                             double correctness_cutoff,
                             double certainty_cutoff) {
  ScannerSets sets;
  sets.correct = correct_scanners(corpus, truth, correctness_cutoff);
  sets.stable = stable_scanners(corpus, certainty_cutoff);
  std::set_intersection(sets.correct.begin(), sets.correct.end(),
                        sets.stable.begin(), sets.stable.end(),
                        std::inserter(sets.trusted, sets.trusted.begin()));
  return sets;
}

std::vector<CorrectnessRow> tabulate_correctness(
    const TimeSeriesCorpus& corpus, const GroundTruth& truth,
    const std::set<std::string>& scanners) {
  if (scanners.empty()) {
    throw ValidationError("tabulate_correctness needs a non-empty scanner set");
  }
  std::vector<CorrectnessRow> rows;
  rows.reserve(scanners.size() * corpus.snapshots.size());
  for (const auto& scanner : scanners) {
    const auto series = correctness_series(corpus, truth, scanner);
    for (const auto& [date, score] : series.points) {
      rows.push_back({scanner, date, score});
    }
  }
  return rows;
}

void write_correctness_csv(std::span<const CorrectnessRow> rows,
                           std::ostream& out) {
  out << "scanner,date,correctness\n";
  for (const auto& row : rows) {
    out << row.scanner << ',' << row.date.to_string() << ','
        << format_double(row.correctness) << '\n';
  }
}

std::vector<CorrectnessRow> read_correctness_csv(std::istream& in) {
  std::vector<CorrectnessRow> rows;
  std::string line;
  std::size_t line_number = 0;
  while (std::getline(in, line)) {
    ++line_number;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (line_number == 1) {
      if (line != "scanner,date,correctness") {
        throw ParseError("correctness CSV: unexpected header '" + line + "'");
      }
      continue;
    }
    const auto c1 = line.find(',');
    const auto c2 = line.find(',', c1 == std::string::npos ? c1 : c1 + 1);
    if (c1 == std::string::npos || c2 == std::string::npos) {
      throw ParseError("correctness CSV line " + std::to_string(line_number) +
                       ": expected three columns");
    }
    CorrectnessRow row;
    row.scanner = line.substr(0, c1);
    row.date = Date::parse(line.substr(c1 + 1, c2 - c1 - 1));
    const std::string value = line.substr(c2 + 1);
    const auto result = std::from_chars(
        value.data(), value.data() + value.size(), row.correctness);
    if (result.ec != std::errc{}) {
      throw ParseError("correctness CSV line " + std::to_string(line_number) +
                       ": bad score '" + value + "'");
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

void write_certainty_csv(std::span<const CertaintyScore> scores,
                         std::ostream& out) {
  out << "scanner,mean_certainty\n";
  for (const auto& score : scores) {
    out << score.scanner << ',' << format_double(score.dataset_mean) << '\n';
  }
}

void write_scanner_sets_json(const ScannerSets& sets, std::ostream& out) {
  nlohmann::ordered_json object;
  object["correct"] = sets.correct;
  object["stable"] = sets.stable;
  object["trusted"] = sets.trusted;
  out << object.dump(2) << '\n';
}

}  // namespace maat
