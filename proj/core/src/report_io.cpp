#include "maat/report_io.hpp"

#include <fstream>
#include <sstream>

#include <json.hpp>

#include "maat/errors.hpp"

namespace maat {

namespace {

using ordered_json = nlohmann::ordered_json;

std::ifstream open_input(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string() + " for reading");
  return in;
}

std::ofstream open_output(const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  return out;
}

Date parse_date_field(const ordered_json& object, const char* field,
                      const std::string& context) {
  if (!object.contains(field) || !object[field].is_string()) {
    throw ParseError(context + ": missing or non-string field '" +
                     std::string(field) + "'");
  }
  const auto text = object[field].get<std::string>();
  auto date = Date::try_parse(text);
  if (!date) {
    throw ParseError(context + ": field '" + std::string(field) +
                     "' holds invalid date '" + text + "'");
  }
  return *date;
}

ScanReport report_from_json(const ordered_json& object,
                            const std::string& context) {
  if (!object.is_object()) throw ParseError(context + ": not a JSON object");
  ScanReport report;
  if (!object.contains("app_id") || !object["app_id"].is_string()) {
    throw ParseError(context + ": missing or non-string field 'app_id'");
  }
  report.app_id = object["app_id"].get<std::string>();
  report.scan_date = parse_date_field(object, "scan_date", context);
  report.first_seen = parse_date_field(object, "first_seen", context);
  report.times_submitted = object.value("times_submitted", std::int64_t{1});
  report.positives = object.value("positives", 0);
  report.total = object.value("total", 0);

  if (object.contains("scans")) {
    if (!object["scans"].is_object()) {
      throw ParseError(context + ": field 'scans' must be an object");
    }
    for (const auto& [scanner, entry] : object["scans"].items()) {
      if (!entry.is_object() || !entry.contains("detected") ||
          !entry["detected"].is_boolean()) {
        throw ParseError(context + ": scanner '" + scanner +
                         "' needs a boolean 'detected' field");
      }
      ScannerResult result;
      result.detected = entry["detected"].get<bool>();
      if (entry.contains("raw_label") && entry["raw_label"].is_string()) {
        result.raw_label = entry["raw_label"].get<std::string>();
      }
      if (entry.contains("version") && entry["version"].is_string()) {
        result.version = entry["version"].get<std::string>();
      }
      report.scans.emplace(scanner, std::move(result));
    }
  }
  for (const char* field : {"permissions", "tags"}) {
    if (!object.contains(field)) continue;
    if (!object[field].is_array()) {
      throw ParseError(context + ": field '" + std::string(field) +
                       "' must be an array");
    }
    auto& target = std::string(field) == "permissions" ? report.permissions
                                                       : report.tags;
    for (const auto& item : object[field]) {
      if (!item.is_string()) {
        throw ParseError(context + ": field '" + std::string(field) +
                         "' must hold strings");
      }
      target.insert(item.get<std::string>());
    }
  }
  return report;
}

ordered_json report_to_json(const ScanReport& report) {
  ordered_json object;
  object["app_id"] = report.app_id;
  object["scan_date"] = report.scan_date.to_string();
  object["first_seen"] = report.first_seen.to_string();
  object["times_submitted"] = report.times_submitted;
  object["positives"] = report.positives;
  object["total"] = report.total;
  ordered_json scans = ordered_json::object();
  for (const auto& [scanner, result] : report.scans) {
    ordered_json entry;
    entry["detected"] = result.detected;
    if (result.raw_label) entry["raw_label"] = *result.raw_label;
    if (result.version) entry["version"] = *result.version;
    scans[scanner] = std::move(entry);
  }
  object["scans"] = std::move(scans);
  object["permissions"] = report.permissions;
  object["tags"] = report.tags;
  return object;
}

}  // namespace

Snapshot read_snapshot(std::istream& in, Date date, const std::string& origin) {
  Snapshot snapshot;
  snapshot.date = date;
  std::string line;
  std::size_t line_number = 0;
  while (std::getline(in, line)) {
    ++line_number;
    if (line.empty()) continue;
    const std::string context =
        origin + ":" + std::to_string(line_number);
    ordered_json object;
    try {
      object = ordered_json::parse(line);
    } catch (const nlohmann::json::parse_error& e) {
      throw ParseError(context + ": " + e.what());
    }
    ScanReport report = report_from_json(object, context);
    validate_report(report);
    if (report.scan_date > date) {
      throw ValidationError(context + ": app " + report.app_id +
                            " scanned " + report.scan_date.to_string() +
                            ", after snapshot date " + date.to_string());
    }
    const std::string app_id = report.app_id;
    if (!snapshot.reports.emplace(app_id, std::move(report)).second) {
      throw ValidationError(context + ": duplicate app " + app_id);
    }
  }
  return snapshot;
}

Snapshot load_snapshot(const std::filesystem::path& path, Date date) {
  auto in = open_input(path);
  return read_snapshot(in, date, path.string());
}

void write_snapshot(const Snapshot& snapshot, std::ostream& out) {
  for (const auto& [app_id, report] : snapshot.reports) {
    out << report_to_json(report).dump() << '\n';
  }
}

void save_snapshot(const Snapshot& snapshot,
                   const std::filesystem::path& path) {
  auto out = open_output(path);
  write_snapshot(snapshot, out);
  if (!out) throw IoError("failed writing " + path.string());
}

TimeSeriesCorpus load_corpus(const std::filesystem::path& manifest_path) {
  auto in = open_input(manifest_path);
  ordered_json manifest;
  try {
    manifest = ordered_json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(manifest_path.string() + ": " + e.what());
  }
  if (!manifest.is_array()) {
    throw ParseError(manifest_path.string() +
                     ": manifest must be a JSON array of {date, path}");
  }
  const auto base = manifest_path.parent_path();
  TimeSeriesCorpus corpus;
  for (const auto& entry : manifest) {
    if (!entry.is_object() || !entry.contains("date") ||
        !entry.contains("path")) {
      throw ParseError(manifest_path.string() +
                       ": manifest entries need 'date' and 'path'");
    }
    const auto date = Date::parse(entry["date"].get<std::string>());
    std::filesystem::path snapshot_path =
        entry["path"].get<std::string>();
    if (snapshot_path.is_relative()) snapshot_path = base / snapshot_path;
    corpus.snapshots.push_back(load_snapshot(snapshot_path, date));
  }
  validate_corpus(corpus);
  return corpus;
}

std::filesystem::path save_corpus(const TimeSeriesCorpus& corpus,
                                  const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  ordered_json manifest = ordered_json::array();
  for (const auto& snapshot : corpus.snapshots) {
    const std::string name = "snapshot-" + snapshot.date.to_string() + ".jsonl";
    save_snapshot(snapshot, dir / name);
    manifest.push_back({{"date", snapshot.date.to_string()}, {"path", name}});
  }
  const auto manifest_path = dir / "manifest.json";
  auto out = open_output(manifest_path);
  out << manifest.dump(2) << '\n';
  return manifest_path;
}

GroundTruth read_ground_truth(std::istream& in, const std::string& origin) {
  GroundTruth truth;
  std::string line;
  std::size_t line_number = 0;
  while (std::getline(in, line)) {
    ++line_number;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (line_number == 1) {
      if (line != "app_id,label") {
        throw ParseError(origin + ":1: expected header 'app_id,label', got '" +
                         line + "'");
      }
      continue;
    }
    const auto comma = line.find(',');
    if (comma == std::string::npos) {
      throw ParseError(origin + ":" + std::to_string(line_number) +
                       ": expected 'app_id,label'");
    }
    const std::string app_id = line.substr(0, comma);
    const Label label = label_from_string(line.substr(comma + 1));
    if (!truth.labels.emplace(app_id, label).second) {
      throw ValidationError(origin + ":" + std::to_string(line_number) +
                            ": duplicate app " + app_id);
    }
  }
  return truth;
}

GroundTruth load_ground_truth(const std::filesystem::path& path) {
  auto in = open_input(path);
  return read_ground_truth(in, path.string());
}

void write_ground_truth(const GroundTruth& truth, std::ostream& out) {
  out << "app_id,label\n";
  for (const auto& [app_id, label] : truth.labels) {
    out << app_id << ',' << to_string(label) << '\n';
  }
}

void save_ground_truth(const GroundTruth& truth,
                       const std::filesystem::path& path) {
  auto out = open_output(path);
  write_ground_truth(truth, out);
  if (!out) throw IoError("failed writing " + path.string());
}

}  // namespace maat
