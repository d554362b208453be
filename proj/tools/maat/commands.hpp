#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace maat::cli {

struct CommonOptions {
  std::vector<std::string> raw_args;  // argv copy for provenance
  bool force = false;
};

struct SimulateOptions : CommonOptions {
  std::string config_path;  // empty with use_default
  bool use_default = false;
  std::uint64_t seed = 0;
  std::string out_dir;
};
int run_simulate(const SimulateOptions& options);

struct ScannerStatsOptions : CommonOptions {
  std::string corpus_manifest;
  std::string truth_path;
  double correctness_cutoff = 0.90;
  double certainty_cutoff = 0.90;
  std::string out_dir;
};
int run_scanner_stats(const ScannerStatsOptions& options);

struct TrainOptions : CommonOptions {
  std::string corpus_manifest;
  std::string truth_path;
  std::string features = "naive-sel";
  std::string until_date;  // optional "YYYY-MM-DD"
  std::uint64_t seed = 0;
  std::string out_model;
  int folds = 10;
  int n_estimators = 100;
  std::string depth_grid = "1,4,10,none";
  double importance_cutoff = 1e-5;
  double correctness_cutoff = 0.90;
  double certainty_cutoff = 0.90;
};
int run_train(const TrainOptions& options);

struct LabelOptions : CommonOptions {
  std::string model_path;
  std::string snapshot_path;
  std::string snapshot_date;  // optional; inferred from scan dates if empty
  std::string as_of_date;     // optional; defaults to the snapshot date
  std::string out_csv;
};
int run_label(const LabelOptions& options);

struct EvalOptions : CommonOptions {
  std::string strategies_path;
  std::string corpus_manifest;
  std::string truth_path;
  std::string ref_corpus_manifest;  // optional, for "bruteforce"
  std::string ref_truth_path;
  std::string out_csv;
};
int run_eval(const EvalOptions& options);

struct DetectOptions : CommonOptions {
  std::string train_vectors;
  std::string train_snapshot;
  std::string train_snapshot_date;  // optional; inferred if empty
  std::string strategy;
  std::string test_vectors;
  std::string test_truth;
  std::string classifier = "all";
  std::uint64_t seed = 0;
  std::string out_json;
};
int run_detect(const DetectOptions& options);

}  // namespace maat::cli
