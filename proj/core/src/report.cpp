#include "maat/report.hpp"

#include "maat/errors.hpp"

namespace maat {

std::string_view to_string(Label label) {
  return is_malicious(label) ? "malicious" : "benign";
}

Label label_from_string(std::string_view text) {
  if (text == "malicious") return Label::Malicious;
  if (text == "benign") return Label::Benign;
  throw ParseError("unknown label '" + std::string(text) +
                   "', expected 'malicious' or 'benign'");
}

Verdict verdict_of(const ScanReport& report, std::string_view scanner) {
  const auto it = report.scans.find(std::string(scanner));
  if (it == report.scans.end()) return Verdict::NotScanned;
  return it->second.detected ? Verdict::Malicious : Verdict::Benign;
}

double report_age_years(const ScanReport& report, Date as_of) {
  if (as_of < report.first_seen) {
    throw ValidationError("app " + report.app_id + ": as-of date " +
                          as_of.to_string() + " precedes first_seen " +
                          report.first_seen.to_string());
  }
  return static_cast<double>(as_of - report.first_seen) / kDaysPerYear;
}

void validate_report(const ScanReport& report) {
  int detected = 0;
  for (const auto& [name, result] : report.scans) {
    if (result.detected) ++detected;
  }
  const int total = static_cast<int>(report.scans.size());
  if (report.positives != detected) {
    throw ValidationError("app " + report.app_id + ": stored positives " +
                          std::to_string(report.positives) +
                          " disagree with scans map (" +
                          std::to_string(detected) + " detections)");
  }
  if (report.total != total) {
    throw ValidationError("app " + report.app_id + ": stored total " +
                          std::to_string(report.total) +
                          " disagrees with scans map size " +
                          std::to_string(total));
  }
  if (report.first_seen > report.scan_date) {
    throw ValidationError("app " + report.app_id + ": first_seen " +
                          report.first_seen.to_string() +
                          " is after scan_date " +
                          report.scan_date.to_string());
  }
  if (report.times_submitted < 1) {
    throw ValidationError("app " + report.app_id +
                          ": times_submitted must be >= 1");
  }
}

void validate_snapshot(const Snapshot& snapshot) {
  for (const auto& [app_id, report] : snapshot.reports) {
    if (app_id != report.app_id) {
      throw ValidationError("snapshot " + snapshot.date.to_string() +
                            ": report keyed as " + app_id +
                            " carries app_id " + report.app_id);
    }
    validate_report(report);
    if (report.scan_date > snapshot.date) {
      throw ValidationError("app " + report.app_id + ": scan_date " +
                            report.scan_date.to_string() +
                            " is after snapshot date " +
                            snapshot.date.to_string());
    }
  }
}

void validate_corpus(const TimeSeriesCorpus& corpus) {
  for (std::size_t i = 0; i < corpus.snapshots.size(); ++i) {
    validate_snapshot(corpus.snapshots[i]);
    if (i > 0 &&
        corpus.snapshots[i].date <= corpus.snapshots[i - 1].date) {
      throw ValidationError("snapshot dates must be strictly increasing (" +
                            corpus.snapshots[i - 1].date.to_string() +
                            " then " + corpus.snapshots[i].date.to_string() +
                            ")");
    }
  }
  if (!corpus.snapshots.empty() && app_ids(corpus).empty()) {
    throw ValidationError("corpus contains snapshots but no apps");
  }
}

std::set<std::string> scanner_names(const TimeSeriesCorpus& corpus) {
  std::set<std::string> names;
  for (const auto& snapshot : corpus.snapshots) {
    for (const auto& [app_id, report] : snapshot.reports) {
      for (const auto& [scanner, result] : report.scans) names.insert(scanner);
    }
  }
  return names;
}

std::set<std::string> app_ids(const TimeSeriesCorpus& corpus) {
  std::set<std::string> ids;
  for (const auto& snapshot : corpus.snapshots) {
    for (const auto& [app_id, report] : snapshot.reports) ids.insert(app_id);
  }
  return ids;
}

}  // namespace maat
