#include <fstream>
#include <iostream>

#include "commands.hpp"
#include "maat/errors.hpp"
#include "maat/harness.hpp"
#include "maat/report_io.hpp"
#include "util.hpp"

namespace maat::cli {

int run_label(const LabelOptions& options) {
  RunRecorder recorder("label", options.raw_args);
  recorder.add_input(options.model_path);
  recorder.add_input(options.snapshot_path);

  const Date snapshot_date =
      options.snapshot_date.empty()
          ? infer_snapshot_date(options.snapshot_path)
          : Date::parse(options.snapshot_date);
  const Date as_of = options.as_of_date.empty()
                         ? snapshot_date
                         : Date::parse(options.as_of_date);

  const ForestStrategy strategy = ForestStrategy::load(options.model_path);
  const Snapshot snapshot =
      load_snapshot(options.snapshot_path, snapshot_date);
  const auto labels = apply_strategy(strategy, snapshot, as_of);

  guard_overwrite(options.out_csv, options.force);
  std::ofstream out(options.out_csv, std::ios::binary);
  if (!out) throw IoError("cannot write " + options.out_csv);
  out << "app_id,label\n";
  for (const auto& [app_id, label] : labels) {
    out << app_id << ',' << to_string(label) << '\n';
  }

  recorder.add_output(options.out_csv);
  recorder.write_beside(options.out_csv);

  std::cout << "labeled " << labels.size() << " reports with '"
            << strategy.name() << "' -> " << options.out_csv << '\n';
  return 0;
}

}  // namespace maat::cli
