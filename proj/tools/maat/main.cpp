#include <cstdlib>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "commands.hpp"
#include "maat/errors.hpp"
#include "maat/parallel.hpp"

namespace {

using namespace maat::cli;

void add_force(CLI::App* cmd, CommonOptions& options) {
  cmd->add_flag("--force", options.force,
                "Overwrite existing outputs");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"maat - scan-report analysis, labeling strategies, and "
               "label-quality experiments"};
  app.require_subcommand(1);

  int jobs = 0;
  app.add_option("--jobs,-j", jobs,
                 "Worker cap (default: all cores; env MAAT_JOBS). Never "
                 "affects results, only wall time.")
      ->envname("MAAT_JOBS");

  const std::vector<std::string> raw_args(argv + 1, argv + argc);

  SimulateOptions simulate;
  simulate.raw_args = raw_args;
  auto* cmd_simulate = app.add_subcommand(
      "simulate", "Generate a synthetic scan-report corpus with planted "
                  "ground truth");
  auto* config_opt = cmd_simulate->add_option(
      "--config", simulate.config_path, "Simulation config JSON");
  auto* default_opt = cmd_simulate->add_flag(
      "--default", simulate.use_default, "Use the built-in default config");
  config_opt->excludes(default_opt);
  cmd_simulate->add_option("--seed", simulate.seed, "RNG seed")->required();
  cmd_simulate->add_option("--out", simulate.out_dir, "Output directory")
      ->required();
  add_force(cmd_simulate, simulate);

  ScannerStatsOptions stats;
  stats.raw_args = raw_args;
  auto* cmd_stats = app.add_subcommand(
      "scanner-stats", "Score scanner correctness and stability over a "
                       "corpus");
  cmd_stats->add_option("--corpus", stats.corpus_manifest, "Corpus manifest")
      ->required();
  cmd_stats->add_option("--truth", stats.truth_path, "Ground-truth CSV")
      ->required();
  cmd_stats->add_option("--correctness-cutoff", stats.correctness_cutoff,
                        "Correct-scanner cutoff (default 0.90)");
  cmd_stats->add_option("--certainty-cutoff", stats.certainty_cutoff,
                        "Stable-scanner cutoff (default 0.90)");
  cmd_stats->add_option("--out", stats.out_dir, "Output directory")
      ->required();
  add_force(cmd_stats, stats);

  TrainOptions train;
  train.raw_args = raw_args;
  auto* cmd_train = app.add_subcommand(
      "train", "Train a forest labeling strategy from a corpus");
  cmd_train->add_option("--corpus", train.corpus_manifest, "Corpus manifest")
      ->required();
  cmd_train->add_option("--truth", train.truth_path, "Ground-truth CSV")
      ->required();
  cmd_train
      ->add_option("--features", train.features,
                   "naive | naive-sel | eng | eng-sel")
      ->required();
  cmd_train->add_option("--until", train.until_date,
                        "Use only snapshots dated <= this");
  cmd_train->add_option("--seed", train.seed, "RNG seed")->required();
  cmd_train->add_option("--out", train.out_model, "Model file")->required();
  cmd_train->add_option("--folds", train.folds, "CV folds (default 10)");
  cmd_train->add_option("--trees", train.n_estimators,
                        "Trees per forest (default 100)");
  cmd_train->add_option("--depth-grid", train.depth_grid,
                        "Comma list, e.g. 1,4,10,none");
  cmd_train->add_option("--importance-cutoff", train.importance_cutoff,
                        "Feature-selection cutoff (default 1e-5)");
  cmd_train->add_option("--correctness-cutoff", train.correctness_cutoff,
                        "Trusted-scanner correctness cutoff");
  cmd_train->add_option("--certainty-cutoff", train.certainty_cutoff,
                        "Trusted-scanner certainty cutoff");
  add_force(cmd_train, train);

  LabelOptions label;
  label.raw_args = raw_args;
  auto* cmd_label = app.add_subcommand(
      "label", "Label one snapshot with a trained model");
  cmd_label->add_option("--model", label.model_path, "Model file")
      ->required();
  cmd_label->add_option("--snapshot", label.snapshot_path, "Snapshot JSONL")
      ->required();
  cmd_label->add_option("--date", label.snapshot_date,
                        "Snapshot date (default: latest scan_date inside)");
  cmd_label->add_option("--as-of", label.as_of_date,
                        "Labeling request date (default: snapshot date)");
  cmd_label->add_option("--out", label.out_csv, "Labels CSV")->required();
  add_force(cmd_label, label);

  EvalOptions eval;
  eval.raw_args = raw_args;
  auto* cmd_eval = app.add_subcommand(
      "eval", "Score labeling strategies per snapshot against a ground "
              "truth");
  cmd_eval->add_option("--strategies", eval.strategies_path,
                       "Strategy descriptor JSON array")
      ->required();
  cmd_eval->add_option("--corpus", eval.corpus_manifest, "Corpus manifest")
      ->required();
  cmd_eval->add_option("--truth", eval.truth_path, "Ground-truth CSV")
      ->required();
  cmd_eval->add_option("--ref-corpus", eval.ref_corpus_manifest,
                       "Reference corpus for the 'bruteforce' strategy");
  cmd_eval->add_option("--ref-truth", eval.ref_truth_path,
                       "Reference ground truth for 'bruteforce'");
  cmd_eval->add_option("--out", eval.out_csv, "Eval rows CSV")->required();
  add_force(cmd_eval, eval);

  DetectOptions detect;
  detect.raw_args = raw_args;
  auto* cmd_detect = app.add_subcommand(
      "detect", "Train downstream classifiers on strategy-labeled vectors "
                "and score them on a hand-labeled test set");
  cmd_detect->add_option("--train-vectors", detect.train_vectors,
                         "Training feature vectors CSV (app_id first)")
      ->required();
  cmd_detect->add_option("--train-corpus-snapshot", detect.train_snapshot,
                         "Snapshot JSONL with the training apps' reports")
      ->required();
  cmd_detect->add_option("--train-snapshot-date", detect.train_snapshot_date,
                         "Snapshot date (default: latest scan_date inside)");
  cmd_detect->add_option("--strategy", detect.strategy,
                         "vt>=N | vt>=P% | drebin | model/descriptor path")
      ->required();
  cmd_detect->add_option("--test-vectors", detect.test_vectors,
                         "Test feature vectors CSV")
      ->required();
  cmd_detect->add_option("--test-truth", detect.test_truth,
                         "Test ground-truth CSV")
      ->required();
  cmd_detect->add_option("--classifier", detect.classifier,
                         "knn | rf | gnb | svm | all (default all)");
  cmd_detect->add_option("--seed", detect.seed, "RNG seed")->required();
  cmd_detect->add_option("--out", detect.out_json, "Metrics JSON")
      ->required();
  add_force(cmd_detect, detect);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  maat::set_max_jobs(jobs);

  try {
    if (cmd_simulate->parsed()) return run_simulate(simulate);
    if (cmd_stats->parsed()) return run_scanner_stats(stats);
    if (cmd_train->parsed()) return run_train(train);
    if (cmd_label->parsed()) return run_label(label);
    if (cmd_eval->parsed()) return run_eval(eval);
    if (cmd_detect->parsed()) return run_detect(detect);
  } catch (const maat::UsageError& e) {
    std::cerr << "maat: " << e.what() << '\n';
    return 2;
  } catch (const maat::Error& e) {
    std::cerr << "maat: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "maat: internal error: " << e.what() << '\n';
    return 1;
  }
  return 2;
}
