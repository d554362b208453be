#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "maat/date.hpp"

namespace maat::cli {

/// Refuses to clobber existing outputs unless forced.
void guard_overwrite(const std::filesystem::path& path, bool force);

/// Provenance record written alongside every command's outputs: normalized
/// command line, seed, and sha256 digests of the inputs. Execution knobs
/// (--jobs) are excluded so reruns stay byte-identical regardless of
/// parallelism.
class RunRecorder {
 public:
  RunRecorder(std::string command, std::vector<std::string> args);

  void set_seed(std::uint64_t seed);
  void add_input(const std::filesystem::path& path);
  /// Digests the manifest and every snapshot file it references.
  void add_corpus_input(const std::filesystem::path& manifest);
  void add_output(const std::string& name);

  /// run.json inside an output directory.
  void write_into(const std::filesystem::path& dir) const;
  /// "<stem>.run.json" next to a file output.
  void write_beside(const std::filesystem::path& output_file) const;

 private:
  nlohmann::ordered_json record_;
};

/// Strips --jobs/-j (and value) from an argv copy.
std::vector<std::string> scrub_jobs_args(const std::vector<std::string>& args);

/// Parses "1,4,10,none" into a depth grid.
std::vector<std::optional<int>> parse_depth_grid(const std::string& text);

/// Largest scan_date in a snapshot file; used when no snapshot date is given.
Date infer_snapshot_date(const std::filesystem::path& path);

}  // namespace maat::cli
