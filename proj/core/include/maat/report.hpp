#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "maat/date.hpp"
#include "maat/label.hpp"

namespace maat {

/// One scanner's judgment on one report. The integer encoding is fixed:
/// -1 not scanned, 0 scanned and deemed benign, 1 scanned and deemed malicious.
enum class Verdict : int { NotScanned = -1, Benign = 0, Malicious = 1 };

constexpr int verdict_value(Verdict v) { return static_cast<int>(v); }

/// Per-scanner entry of a scan report. detected=true maps to
/// Verdict::Malicious, detected=false to Verdict::Benign.
struct ScannerResult {
  bool detected = false;
  std::optional<std::string> raw_label;
  std::optional<std::string> version;

  friend bool operator==(const ScannerResult&, const ScannerResult&) = default;
};

/// One app's scan snapshot. The scans map is authoritative: positives and
/// total are validated against it, never trusted.
struct ScanReport {
  std::string app_id;
  Date scan_date;
  Date first_seen;
  std::int64_t times_submitted = 1;
  int positives = 0;
  int total = 0;
  std::map<std::string, ScannerResult> scans;
  std::set<std::string> permissions;
  std::set<std::string> tags;

  friend bool operator==(const ScanReport&, const ScanReport&) = default;
};

/// All reports downloaded on one date, keyed by app id.
struct Snapshot {
  Date date;
  std::map<std::string, ScanReport> reports;

  friend bool operator==(const Snapshot&, const Snapshot&) = default;
};

/// Date-ordered snapshots of a report population. Snapshot dates are strictly
/// increasing; individual snapshots may omit apps.
struct TimeSeriesCorpus {
  std::vector<Snapshot> snapshots;

  friend bool operator==(const TimeSeriesCorpus&,
                         const TimeSeriesCorpus&) = default;
};

/// Known labels for a set of apps.
struct GroundTruth {
  std::map<std::string, Label> labels;

  friend bool operator==(const GroundTruth&, const GroundTruth&) = default;
};

/// Malicious if the scanner is present with detected=true, Benign if present
/// with detected=false, NotScanned if absent. Total over all inputs.
Verdict verdict_of(const ScanReport& report, std::string_view scanner);

/// Report age in years: (as_of - first_seen) days / 365.25.
/// Throws ValidationError if as_of < first_seen.
double report_age_years(const ScanReport& report, Date as_of);

/// Recomputes positives/total from the scans map and checks them against the
/// stored fields plus first_seen <= scan_date; throws ValidationError naming
/// the app on any mismatch.
void validate_report(const ScanReport& report);

/// validate_report for every entry, plus scan_date <= snapshot date.
void validate_snapshot(const Snapshot& snapshot);

/// Snapshot validation plus strictly increasing dates and a non-empty union
/// of app ids.
void validate_corpus(const TimeSeriesCorpus& corpus);

/// Union of scanner names appearing anywhere in the corpus.
std::set<std::string> scanner_names(const TimeSeriesCorpus& corpus);

/// Union of app ids appearing anywhere in the corpus.
std::set<std::string> app_ids(const TimeSeriesCorpus& corpus);

}  // namespace maat
