#include <iostream>

#include "commands.hpp"
#include "maat/report_io.hpp"
#include "maat/simulator.hpp"
#include "util.hpp"

namespace maat::cli {

int run_simulate(const SimulateOptions& options) {
  SimConfig config;
  RunRecorder recorder("simulate", options.raw_args);
  if (options.use_default) {
    config = default_config(options.seed);
  } else {
    recorder.add_input(options.config_path);
    config = load_sim_config(options.config_path);
    config.seed = options.seed;
  }
  recorder.set_seed(options.seed);

  const std::filesystem::path out_dir = options.out_dir;
  std::filesystem::create_directories(out_dir);
  guard_overwrite(out_dir / "manifest.json", options.force);
  guard_overwrite(out_dir / "ground_truth.csv", options.force);

  const SimOutput output = generate_corpus(config);
  save_corpus(output.corpus, out_dir);
  save_ground_truth(output.truth, out_dir / "ground_truth.csv");
  save_sim_config(config, out_dir / "sim-config.json");

  recorder.add_output("manifest.json");
  for (const auto& snapshot : output.corpus.snapshots) {
    recorder.add_output("snapshot-" + snapshot.date.to_string() + ".jsonl");
  }
  recorder.add_output("ground_truth.csv");
  recorder.add_output("sim-config.json");
  recorder.write_into(out_dir);

  std::cout << "simulated " << config.n_apps << " apps x "
            << config.snapshot_dates.size() << " snapshots ("
            << config.scanners.size() << " scanners) into "
            << out_dir.string() << '\n';
  return 0;
}

}  // namespace maat::cli
