#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "maat/report.hpp"

namespace maat {

/// Engine-version swap: from this snapshot index on, the scanner's detection
/// rates are replaced by the degraded pair and verdicts re-drawn once.
struct VersionSwap {
  int snapshot_index = 0;
  double degraded_tpr = 0.0;
  double degraded_fpr = 0.0;
};

/// Generative description of one scanner's planted behavior.
struct ScannerProfile {
  std::string name;
  double tpr = 0.0;             // P(detect | malicious)
  double fpr = 0.0;             // P(detect | benign)
  double flip_prob = 0.0;       // per-snapshot chance a verdict flips
  double exclusion_prob = 0.0;  // per-report chance the scanner is omitted
  std::optional<VersionSwap> version_swap;
};

/// One app's planted identity. Detections are suppressed while the report is
/// immature: with probability q0 at first_seen, decaying linearly to zero
/// over onset_lag snapshot intervals.
struct AppSpec {
  std::string app_id;
  Label truth = Label::Benign;
  Date first_seen;
  int onset_lag = 0;
  double q0 = 0.0;
};

struct SimConfig {
  std::vector<ScannerProfile> scanners;
  int n_apps = 0;
  double malicious_fraction = 0.5;
  std::vector<Date> snapshot_dates;
  std::vector<std::string> permission_vocab;
  std::vector<std::string> tag_vocab;
  double q0 = 0.8;
  int onset_lag = 3;
  std::uint64_t seed = 0;

  // First-seen spread: fresh apps are born between (window start -
  // onset_lag intervals) and the last snapshot; the rest predate the window
  // by up to mature_lookback_days and are fully mature throughout.
  double fresh_fraction = 0.30;
  int mature_lookback_days = 1095;
};

/// Throws ValidationError naming the offending field.
void validate(const SimConfig& config);

struct SimOutput {
  TimeSeriesCorpus corpus;
  GroundTruth truth;
};

/// Deterministic given config.seed: per-(app, scanner) streams derive from
/// (seed, app index, scanner index), so output is byte-identical across runs
/// and worker counts. Apps appear only in snapshots dated >= first_seen;
/// positives/total are recomputed per report; times_submitted counts the
/// snapshots seen so far.
SimOutput generate_corpus(const SimConfig& config);

/// 60 scanners with planted roles: 16 consistently good engines
/// ("av-anchor-*"), 2 exclusion-heavy oscillators ("av-flaky-*"), 2 engines
/// whose version swaps to a near-useless build at snapshot 3 ("av-legacy-*"),
/// and 40 mediocre engines ("av-noise-*"). 2000 apps, half malicious, 10
/// biweekly snapshots.
SimConfig default_config(std::uint64_t seed);

SimConfig load_sim_config(const std::filesystem::path& path);
void save_sim_config(const SimConfig& config,
                     const std::filesystem::path& path);

}  // namespace maat
