#include "util.hpp"

#include <fstream>

#include "maat/digest.hpp"
#include "maat/errors.hpp"

namespace maat::cli {

void guard_overwrite(const std::filesystem::path& path, bool force) {
  if (!force && std::filesystem::exists(path)) {
    throw IoError("refusing to overwrite " + path.string() +
                  " (pass --force to replace it)");
  }
}

RunRecorder::RunRecorder(std::string command, std::vector<std::string> args) {
  record_["format"] = "maat-run/1";
  record_["command"] = std::move(command);
  record_["args"] = scrub_jobs_args(args);
  record_["inputs"] = nlohmann::ordered_json::object();
  record_["outputs"] = nlohmann::ordered_json::array();
}

void RunRecorder::set_seed(std::uint64_t seed) { record_["seed"] = seed; }

void RunRecorder::add_input(const std::filesystem::path& path) {
  record_["inputs"][path.string()] = "sha256:" + sha256_file(path);
}

void RunRecorder::add_corpus_input(const std::filesystem::path& manifest) {
  add_input(manifest);
  std::ifstream in(manifest);
  if (!in) throw IoError("cannot open " + manifest.string() + " for reading");
  nlohmann::ordered_json entries;
  try {
    entries = nlohmann::ordered_json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(manifest.string() + ": " + e.what());
  }
  if (!entries.is_array()) return;
  for (const auto& entry : entries) {
    if (!entry.is_object() || !entry.contains("path")) continue;
    std::filesystem::path snapshot = entry["path"].get<std::string>();
    if (snapshot.is_relative()) snapshot = manifest.parent_path() / snapshot;
    add_input(snapshot);
  }
}

void RunRecorder::add_output(const std::string& name) {
  record_["outputs"].push_back(name);
}

void RunRecorder::write_into(const std::filesystem::path& dir) const {
  std::ofstream out(dir / "run.json", std::ios::binary);
  if (!out) {
    throw IoError("cannot write " + (dir / "run.json").string());
  }
  out << record_.dump(2) << '\n';
}

void RunRecorder::write_beside(const std::filesystem::path& output_file) const {
  std::filesystem::path path = output_file;
  path += ".run.json";
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path.string());
  out << record_.dump(2) << '\n';
}

std::vector<std::string> scrub_jobs_args(const std::vector<std::string>& args) {
  std::vector<std::string> cleaned;
  for (std::size_t i = 0; i < args.size(); ++i) {
    const std::string& arg = args[i];
    if (arg == "--jobs" || arg == "-j") {
      ++i;  // skip the value too
      continue;
    }
    if (arg.rfind("--jobs=", 0) == 0 || arg.rfind("-j=", 0) == 0) continue;
    cleaned.push_back(arg);
  }
  return cleaned;
}

std::vector<std::optional<int>> parse_depth_grid(const std::string& text) {
  std::vector<std::optional<int>> grid;
  std::size_t start = 0;
  while (start <= text.size()) {
    const auto comma = text.find(',', start);
    const std::string token = text.substr(
        start, comma == std::string::npos ? comma : comma - start);
    if (token.empty()) {
      throw UsageError("empty entry in depth grid '" + text + "'");
    }
    if (token == "none" || token == "None" || token == "unbounded") {
      grid.push_back(std::nullopt);
    } else {
      try {
        const int depth = std::stoi(token);
        if (depth < 1) throw std::invalid_argument("non-positive");
        grid.push_back(depth);
      } catch (const std::exception&) {
        throw UsageError("bad depth grid entry '" + token +
                         "', expected a positive integer or 'none'");
      }
    }
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  if (grid.empty()) throw UsageError("depth grid must be non-empty");
  return grid;
}

Date infer_snapshot_date(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string() + " for reading");
  std::string line;
  std::optional<Date> latest;
  std::size_t line_number = 0;
  while (std::getline(in, line)) {
    ++line_number;
    if (line.empty()) continue;
    nlohmann::json object;
    try {
      object = nlohmann::json::parse(line);
    } catch (const nlohmann::json::parse_error& e) {
      throw ParseError(path.string() + ":" + std::to_string(line_number) +
                       ": " + e.what());
    }
    if (object.contains("scan_date") && object["scan_date"].is_string()) {
      const auto date = Date::try_parse(object["scan_date"].get<std::string>());
      if (date && (!latest || *date > *latest)) latest = date;
    }
  }
  if (!latest) {
    throw ValidationError(path.string() +
                          ": no scan_date found; pass the snapshot date "
                          "explicitly");
  }
  return *latest;
}

}  // namespace maat::cli
