#include "maat/harness.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <ostream>

#include <json.hpp>

#include "maat/errors.hpp"

namespace maat {

namespace {

using ordered_json = nlohmann::ordered_json;

std::string format_double(double value) {
  char buffer[32];
  const auto result = std::to_chars(buffer, buffer + sizeof(buffer), value);
  return std::string(buffer, result.ptr);
}

ordered_json node_to_json(const TreeNode& node) {
  ordered_json object;
  if (node.is_leaf()) {
    object["kind"] = "leaf";
  } else {
    object["kind"] = "split";
    object["feature"] = node.feature_index;
    object["threshold"] = node.threshold;
  }
  object["benign"] = node.n_benign;
  object["malicious"] = node.n_malicious;
  object["gini"] = node.node_gini;
  object["prediction"] = std::string(to_string(node.prediction));
  if (!node.is_leaf()) {
    object["left"] = node_to_json(*node.left);
    object["right"] = node_to_json(*node.right);
  }
  return object;
}

std::unique_ptr<TreeNode> node_from_json(const ordered_json& object) {
  auto node = std::make_unique<TreeNode>();
  node->n_benign = object.at("benign").get<std::int64_t>();
  node->n_malicious = object.at("malicious").get<std::int64_t>();
  node->node_gini = object.at("gini").get<double>();
  node->prediction =
      label_from_string(object.at("prediction").get<std::string>());
  if (object.at("kind").get<std::string>() == "split") {
    node->feature_index = object.at("feature").get<int>();
    node->threshold = object.at("threshold").get<double>();
    node->left = node_from_json(object.at("left"));
    node->right = node_from_json(object.at("right"));
  }
  return node;
}

ordered_json depth_to_json(const std::optional<int>& depth) {
  if (depth) return *depth;
  return nullptr;
}

std::optional<int> depth_from_json(const ordered_json& value) {
  if (value.is_null()) return std::nullopt;
  return value.get<int>();
}

}  // namespace

std::string_view to_string(FeatureSetKind kind) {
  switch (kind) {
    case FeatureSetKind::Naive: return "naive";
    case FeatureSetKind::NaiveSelected: return "naive-sel";
    case FeatureSetKind::Engineered: return "eng";
    case FeatureSetKind::EngineeredSelected: return "eng-sel";
  }
  return "naive";
}

FeatureSetKind feature_set_kind_from_string(std::string_view text) {
  if (text == "naive") return FeatureSetKind::Naive;
  if (text == "naive-sel") return FeatureSetKind::NaiveSelected;
  if (text == "eng") return FeatureSetKind::Engineered;
  if (text == "eng-sel") return FeatureSetKind::EngineeredSelected;
  throw UsageError("unknown feature set kind '" + std::string(text) +
                   "', expected naive | naive-sel | eng | eng-sel");
}

ForestStrategy::ForestStrategy(RandomForest forest, FeatureSchema schema,
                               FeatureSetKind kind, Date trained_from,
                               Date trained_until, std::string name)
    : forest_(std::move(forest)), schema_(std::move(schema)), kind_(kind),
      trained_from_(trained_from), trained_until_(trained_until),
      name_(std::move(name)) {
  if (name_.empty()) name_ = std::string(to_string(kind_));
}

Label ForestStrategy::label(const ScanReport& report, Date as_of) const {
  const FeatureVector vector = extract(report, schema_, as_of);
  return forest_.predict(vector.values);
}

void ForestStrategy::write(std::ostream& out) const {
  ordered_json object;
  object["version"] = "maat-forest/1";
  object["name"] = name_;
  object["feature_kind"] = std::string(to_string(kind_));
  object["trained_from"] = trained_from_.to_string();
  object["trained_until"] = trained_until_.to_string();

  ordered_json schema;
  schema["provenance"] = std::string(to_string(schema_.provenance));
  auto entries = ordered_json::array();
  for (const auto& entry : schema_.entries) {
    entries.push_back({{"name", entry.name},
                       {"kind", std::string(to_string(entry.kind))}});
  }
  schema["entries"] = std::move(entries);
  object["schema"] = std::move(schema);

  ordered_json hyperparams;
  hyperparams["n_estimators"] = forest_.params().n_estimators;
  hyperparams["max_depth"] = depth_to_json(forest_.params().max_depth);
  object["hyperparams"] = std::move(hyperparams);
  object["seed"] = forest_.seed();

  auto trees = ordered_json::array();
  for (const auto& tree : forest_.trees()) {
    ordered_json record;
    record["max_depth"] = depth_to_json(tree.max_depth());
    record["importances"] = tree.importances();
    record["root"] = node_to_json(tree.root());
    trees.push_back(std::move(record));
  }
  object["trees"] = std::move(trees);
  out << object.dump() << '\n';
}

void ForestStrategy::save(const std::filesystem::path& path) const {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  write(out);
  if (!out) throw IoError("failed writing " + path.string());
}

ForestStrategy ForestStrategy::read(std::istream& in) {
  ordered_json object;
  try {
    object = ordered_json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(std::string("model file: ") + e.what());
  }
  const auto version = object.value("version", std::string{});
  if (version != "maat-forest/1") {
    throw ParseError("unsupported model version '" + version + "'");
  }

  FeatureSchema schema;
  schema.provenance = provenance_from_string(
      object.at("schema").at("provenance").get<std::string>());
  for (const auto& entry : object.at("schema").at("entries")) {
    schema.entries.push_back(
        {entry.at("name").get<std::string>(),
         feature_kind_from_string(entry.at("kind").get<std::string>())});
  }
  schema.as_of_policy = AgePolicy::RequestDate;

  const auto& hyperparams = object.at("hyperparams");
  std::vector<DecisionTree> trees;
  for (const auto& record : object.at("trees")) {
    trees.emplace_back(node_from_json(record.at("root")),
                       depth_from_json(record.at("max_depth")),
                       record.at("importances").get<std::vector<double>>());
  }
  RandomForest forest(
      std::move(trees),
      ForestHyperparams{hyperparams.at("n_estimators").get<int>(),
                        depth_from_json(hyperparams.at("max_depth"))},
      object.at("seed").get<std::uint64_t>());

  return ForestStrategy(
      std::move(forest), std::move(schema),
      feature_set_kind_from_string(
          object.at("feature_kind").get<std::string>()),
      Date::parse(object.at("trained_from").get<std::string>()),
      Date::parse(object.at("trained_until").get<std::string>()),
      object.value("name", std::string{}));
}

ForestStrategy ForestStrategy::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string() + " for reading");
  return read(in);
}

ForestStrategy train_strategy(const TimeSeriesCorpus& corpus,
                              const GroundTruth& truth, FeatureSetKind kind,
                              const GridSearchConfig& config,
                              const TrainingCutoffs& cutoffs) {
  if (corpus.snapshots.empty()) {
    throw ValidationError("training needs a non-empty corpus");
  }
  if (truth.labels.empty()) {
    throw ValidationError("training needs a non-empty ground truth");
  }
  const bool has_benign = std::any_of(
      truth.labels.begin(), truth.labels.end(),
      [](const auto& kv) { return !is_malicious(kv.second); });
  const bool has_malicious = std::any_of(
      truth.labels.begin(), truth.labels.end(),
      [](const auto& kv) { return is_malicious(kv.second); });
  if (!has_benign || !has_malicious) {
    throw ValidationError("training needs both classes in the ground truth");
  }
  if (corpus.snapshots.size() < 2) {
    emit_warning("training on a single snapshot; scanner stability is "
                 "vacuous and report maturity cannot be learned");
  }

  FeatureSchema schema;
  if (kind == FeatureSetKind::Engineered ||
      kind == FeatureSetKind::EngineeredSelected) {
    const ScannerSets sets = trusted_scanners(
        corpus, truth, cutoffs.correctness, cutoffs.certainty);
    schema = build_engineered_schema(corpus, sets.trusted);
  } else {
    schema = build_naive_schema(corpus);
  }

  Matrix rows(0, schema.size());
  std::vector<Label> labels;
  for (const auto& snapshot : corpus.snapshots) {
    for (const auto& [app_id, report] : snapshot.reports) {
      const auto it = truth.labels.find(app_id);
      if (it == truth.labels.end()) continue;
      rows.push_row(extract(report, schema, snapshot.date).values);
      labels.push_back(it->second);
    }
  }
  if (rows.rows == 0) {
    throw ValidationError("no ground-truth app appears in the corpus");
  }

  if (kind == FeatureSetKind::NaiveSelected ||
      kind == FeatureSetKind::EngineeredSelected) {
    const FeatureSchema selected = select_features(
        schema, DataView(rows), labels, cutoffs.importance, config.seed);
    if (selected.entries.empty()) {
      throw ValidationError("feature selection kept no features");
    }
    const auto projection = schema_projection(schema, selected);
    Matrix projected(rows.rows, projection.size());
    for (std::size_t r = 0; r < rows.rows; ++r) {
      for (std::size_t c = 0; c < projection.size(); ++c) {
        projected.at(r, c) = rows.at(r, projection[c]);
      }
    }
    rows = std::move(projected);
    schema = selected;
  }

  GridSearchResult result = grid_search(DataView(rows), labels, config);
  return ForestStrategy(std::move(result.forest), std::move(schema), kind,
                        corpus.snapshots.front().date,
                        corpus.snapshots.back().date);
}

std::map<std::string, Label> apply_strategy(const LabelingStrategy& strategy,
                                            const Snapshot& snapshot,
                                            Date as_of) {
  std::map<std::string, Label> labels;
  for (const auto& [app_id, report] : snapshot.reports) {
    labels.emplace(app_id, strategy.label(report, as_of));
  }
  return labels;
}

StrategySpec count_spec(int t) {
  StrategySpec spec;
  spec.strategy = std::make_shared<CountThreshold>(t);
  spec.name = spec.strategy->name();
  return spec;
}

StrategySpec percent_spec(double p) {
  StrategySpec spec;
  spec.strategy = std::make_shared<PercentThreshold>(p);
  spec.name = spec.strategy->name();
  return spec;
}

namespace {

StrategySpec spec_from_descriptor(const ordered_json& descriptor,
                                  const std::filesystem::path& base_dir) {
  if (!descriptor.is_object() || !descriptor.contains("kind")) {
    throw UsageError("strategy descriptor needs a 'kind' field");
  }
  const auto kind = descriptor.at("kind").get<std::string>();
  StrategySpec spec;
  if (kind == "count") {
    spec.strategy =
        std::make_shared<CountThreshold>(descriptor.at("t").get<int>());
  } else if (kind == "percent") {
    spec.strategy =
        std::make_shared<PercentThreshold>(descriptor.at("p").get<double>());
  } else if (kind == "subset") {
    std::set<std::string> scanners;
    for (const auto& name : descriptor.at("scanners")) {
      scanners.insert(name.get<std::string>());
    }
    spec.strategy = std::make_shared<SubsetThreshold>(
        std::move(scanners), descriptor.at("t").get<int>(),
        descriptor.value("name", std::string{}));
  } else if (kind == "forest") {
    std::filesystem::path path = descriptor.at("path").get<std::string>();
    if (path.is_relative()) path = base_dir / path;
    spec.strategy =
        std::make_shared<ForestStrategy>(ForestStrategy::load(path));
  } else if (kind == "bruteforce" || kind == "best") {
    spec.kind = kind == "best" ? StrategySpec::Kind::Best
                               : StrategySpec::Kind::Bruteforce;
    spec.t_max = descriptor.value("t_max", 60);
    spec.name = kind;
  } else {
    throw UsageError("unknown strategy kind '" + kind + "'");
  }
  if (spec.strategy) spec.name = spec.strategy->name();
  if (descriptor.contains("name")) {
    spec.name = descriptor.at("name").get<std::string>();
  }
  return spec;
}

}  // namespace

std::vector<StrategySpec> load_strategy_specs(
    const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string() + " for reading");
  ordered_json array;
  try {
    array = ordered_json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(path.string() + ": " + e.what());
  }
  if (!array.is_array() || array.empty()) {
    throw UsageError(path.string() +
                     ": expected a non-empty JSON array of descriptors");
  }
  std::vector<StrategySpec> specs;
  for (const auto& descriptor : array) {
    specs.push_back(spec_from_descriptor(descriptor, path.parent_path()));
  }
  return specs;
}

StrategySpec strategy_spec_from_shorthand(const std::string& text) {
  if (text == "bruteforce" || text == "best") {
    StrategySpec spec;
    spec.kind = text == "best" ? StrategySpec::Kind::Best
                               : StrategySpec::Kind::Bruteforce;
    spec.name = text;
    return spec;
  }
  if (text == "drebin") {
    StrategySpec spec;
    spec.strategy = make_drebin_strategy();
    spec.name = spec.strategy->name();
    return spec;
  }
  if (text.rfind("vt>=", 0) == 0) {
    const std::string value = text.substr(4);
    if (!value.empty() && value.back() == '%') {
      const double percent = std::stod(value.substr(0, value.size() - 1));
      return percent_spec(percent / 100.0);
    }
    return count_spec(std::stoi(value));
  }
  const std::filesystem::path path(text);
  if (std::filesystem::exists(path)) {
    std::ifstream in(path);
    ordered_json object;
    try {
      object = ordered_json::parse(in);
    } catch (const nlohmann::json::parse_error& e) {
      throw ParseError(path.string() + ": " + e.what());
    }
    if (object.is_object() && object.contains("version")) {
      StrategySpec spec;
      spec.strategy =
          std::make_shared<ForestStrategy>(ForestStrategy::load(path));
      spec.name = spec.strategy->name();
      return spec;
    }
    if (object.is_object()) {
      return spec_from_descriptor(object, path.parent_path());
    }
    throw UsageError(path.string() +
                     ": expected a model file or a strategy descriptor");
  }
  throw UsageError("unknown strategy '" + text + "'");
}

namespace {

// Ground truth restricted to the apps present in the snapshot; apps missing
// from a snapshot are skipped for that date.
GroundTruth present_truth(const Snapshot& snapshot, const GroundTruth& truth) {
  GroundTruth present;
  for (const auto& [app_id, label] : truth.labels) {
    if (snapshot.reports.contains(app_id)) {
      present.labels.emplace(app_id, label);
    }
  }
  if (present.labels.empty()) {
    throw ValidationError("snapshot " + snapshot.date.to_string() +
                          " contains no ground-truth apps");
  }
  return present;
}

const Snapshot& reference_snapshot_for(const TimeSeriesCorpus& reference,
                                       Date date) {
  const Snapshot* chosen = &reference.snapshots.front();
  for (const auto& snapshot : reference.snapshots) {
    if (snapshot.date <= date) chosen = &snapshot;
  }
  return *chosen;
}

ConfusionCounts confuse_threshold(const Snapshot& snapshot,
                                  const GroundTruth& present, int t) {
  ConfusionCounts counts;
  for (const auto& [app_id, label] : present.labels) {
    const auto& report = snapshot.reports.at(app_id);
    counts.record(label, label_count_threshold(report, t));
  }
  return counts;
}

}  // namespace

std::vector<EvalRow> timeseries_eval(std::span<const StrategySpec> strategies,
                                     const TimeSeriesCorpus& corpus,
                                     const GroundTruth& truth,
                                     const EvalOptions& options) {
  if (strategies.empty()) {
    throw ValidationError("evaluation needs at least one strategy");
  }
  if (corpus.snapshots.empty()) {
    throw ValidationError("evaluation needs at least one snapshot");
  }

  std::vector<GroundTruth> present;
  present.reserve(corpus.snapshots.size());
  for (const auto& snapshot : corpus.snapshots) {
    present.push_back(present_truth(snapshot, truth));
  }

  std::vector<EvalRow> rows;
  rows.reserve(strategies.size() * corpus.snapshots.size());
  for (const auto& spec : strategies) {
    for (std::size_t s = 0; s < corpus.snapshots.size(); ++s) {
      const Snapshot& snapshot = corpus.snapshots[s];
      ConfusionCounts counts;
      switch (spec.kind) {
        case StrategySpec::Kind::Fixed: {
          for (const auto& [app_id, label] : present[s].labels) {
            counts.record(label, spec.strategy->label(
                                     snapshot.reports.at(app_id),
                                     snapshot.date));
          }
          break;
        }
        case StrategySpec::Kind::Bruteforce: {
          if (!options.reference_corpus || !options.reference_truth) {
            throw UsageError("the 'bruteforce' strategy needs a reference "
                             "corpus and reference truth");
          }
          const Snapshot& reference =
              reference_snapshot_for(*options.reference_corpus,
                                     snapshot.date);
          const GroundTruth reference_present =
              present_truth(reference, *options.reference_truth);
          const auto tuned =
              brute_force_threshold(reference, reference_present, spec.t_max);
          counts = confuse_threshold(snapshot, present[s], tuned.threshold);
          break;
        }
        case StrategySpec::Kind::Best: {
          const auto tuned =
              brute_force_threshold(snapshot, present[s], spec.t_max);
          counts = confuse_threshold(snapshot, present[s], tuned.threshold);
          break;
        }
      }
      rows.push_back({spec.name, snapshot.date, counts, mcc(counts)});
    }
  }
  return rows;
}

void write_eval_csv(std::span<const EvalRow> rows, std::ostream& out) {
  out << "strategy,date,tp,fp,tn,fn,mcc\n";
  for (const auto& row : rows) {
    out << row.strategy << ',' << row.date.to_string() << ','
        << row.counts.tp << ',' << row.counts.fp << ',' << row.counts.tn
        << ',' << row.counts.fn << ',' << format_double(row.mcc) << '\n';
  }
}

}  // namespace maat
