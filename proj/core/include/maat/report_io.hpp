#pragma once

#include <filesystem>
#include <iosfwd>

#include "maat/report.hpp"

namespace maat {

/// Reads a line-delimited JSON snapshot file (one report object per line).
/// Positives/total are recomputed from the scans map and cross-checked
/// against the stored fields. Parse errors name the line, consistency errors
/// name the app.
Snapshot load_snapshot(const std::filesystem::path& path, Date date);
Snapshot read_snapshot(std::istream& in, Date date,
                       const std::string& origin = "<stream>");

void save_snapshot(const Snapshot& snapshot, const std::filesystem::path& path);
void write_snapshot(const Snapshot& snapshot, std::ostream& out);

/// Corpus manifest: JSON array of {date, path}; paths are resolved relative
/// to the manifest's directory.
TimeSeriesCorpus load_corpus(const std::filesystem::path& manifest_path);

/// Writes one "snapshot-YYYY-MM-DD.jsonl" per snapshot plus manifest.json
/// into dir; returns the manifest path.
std::filesystem::path save_corpus(const TimeSeriesCorpus& corpus,
                                  const std::filesystem::path& dir);

/// CSV with header "app_id,label"; label is "malicious" or "benign".
GroundTruth load_ground_truth(const std::filesystem::path& path);
GroundTruth read_ground_truth(std::istream& in,
                              const std::string& origin = "<stream>");
void save_ground_truth(const GroundTruth& truth,
                       const std::filesystem::path& path);
void write_ground_truth(const GroundTruth& truth, std::ostream& out);

}  // namespace maat
