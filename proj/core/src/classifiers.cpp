#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <numeric>
#include <ostream>

#include "maat/errors.hpp"
#include "maat/harness.hpp"

namespace maat {

namespace {

std::string format_double(double value) {
  char buffer[32];
  const auto result = std::to_chars(buffer, buffer + sizeof(buffer), value);
  return std::string(buffer, result.ptr);
}

double squared_distance(std::span<const double> a, std::span<const double> b) {
  double sum = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = a[i] - b[i];
    sum += d * d;
  }
  return sum;
}

void require_both_classes(std::span<const Label> y, const char* who) {
  const bool has_benign =
      std::any_of(y.begin(), y.end(), [](Label l) { return !is_malicious(l); });
  const bool has_malicious = std::any_of(y.begin(), y.end(), is_malicious);
  if (!has_benign || !has_malicious) {
    throw ValidationError(std::string(who) +
                          " needs both classes in the training labels");
  }
}

Matrix gather_rows(const DataView& X, const std::vector<std::size_t>& rows) {
  Matrix result(rows.size(), X.cols());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const auto row = X.row(rows[i]);
    std::copy(row.begin(), row.end(), result.row(i).begin());
  }
  return result;
}

}  // namespace

std::string_view to_string(ClassifierKind kind) {
  switch (kind) {
    case ClassifierKind::Knn: return "knn";
    case ClassifierKind::RandomForestClassifier: return "rf";
    case ClassifierKind::Gnb: return "gnb";
    case ClassifierKind::LinearSvm: return "svm";
  }
  return "knn";
}

ClassifierKind classifier_kind_from_string(std::string_view text) {
  if (text == "knn") return ClassifierKind::Knn;
  if (text == "rf") return ClassifierKind::RandomForestClassifier;
  if (text == "gnb") return ClassifierKind::Gnb;
  if (text == "svm") return ClassifierKind::LinearSvm;
  throw UsageError("unknown classifier '" + std::string(text) +
                   "', expected knn | rf | gnb | svm");
}

Label knn_predict(const DataView& train_X, std::span<const Label> train_y,
                  std::span<const double> x, int k) {
  if (k < 1 || static_cast<std::size_t>(k) > train_X.rows()) {
    throw ValidationError("knn: k must satisfy 1 <= k <= " +
                          std::to_string(train_X.rows()));
  }
  std::vector<std::pair<double, std::size_t>> distances;
  distances.reserve(train_X.rows());
  for (std::size_t i = 0; i < train_X.rows(); ++i) {
    distances.emplace_back(squared_distance(train_X.row(i), x), i);
  }
  std::sort(distances.begin(), distances.end());
  int malicious = 0;
  for (int i = 0; i < k; ++i) {
    if (is_malicious(train_y[distances[static_cast<std::size_t>(i)].second])) {
      ++malicious;
    }
  }
  return malicious > k - malicious ? Label::Malicious : Label::Benign;
}

GnbModel gnb_fit(const DataView& X, std::span<const Label> y) {
  require_both_classes(y, "gaussian naive bayes");
  const std::size_t d = X.cols();
  GnbModel model;
  std::size_t counts[2] = {0, 0};
  for (int c = 0; c < 2; ++c) {
    model.mean[c].assign(d, 0.0);
    model.variance[c].assign(d, 0.0);
  }
  for (std::size_t i = 0; i < X.rows(); ++i) {
    const int c = is_malicious(y[i]) ? 1 : 0;
    ++counts[c];
    const auto row = X.row(i);
    for (std::size_t j = 0; j < d; ++j) model.mean[c][j] += row[j];
  }
  for (int c = 0; c < 2; ++c) {
    for (std::size_t j = 0; j < d; ++j) {
      model.mean[c][j] /= static_cast<double>(counts[c]);
    }
  }
  for (std::size_t i = 0; i < X.rows(); ++i) {
    const int c = is_malicious(y[i]) ? 1 : 0;
    const auto row = X.row(i);
    for (std::size_t j = 0; j < d; ++j) {
      const double delta = row[j] - model.mean[c][j];
      model.variance[c][j] += delta * delta;
    }
  }
  double max_variance = 0.0;
  for (int c = 0; c < 2; ++c) {
    for (std::size_t j = 0; j < d; ++j) {
      model.variance[c][j] /= static_cast<double>(counts[c]);
      max_variance = std::max(max_variance, model.variance[c][j]);
    }
  }
  const double floor =
      max_variance > 0.0 ? 1e-9 * max_variance : 1e-9;
  for (int c = 0; c < 2; ++c) {
    for (std::size_t j = 0; j < d; ++j) {
      model.variance[c][j] = std::max(model.variance[c][j], floor);
    }
    model.log_prior[c] = std::log(static_cast<double>(counts[c]) /
                                  static_cast<double>(X.rows()));
  }
  return model;
}

Label gnb_predict(const GnbModel& model, std::span<const double> x) {
  double scores[2];
  for (int c = 0; c < 2; ++c) {
    double score = model.log_prior[c];
    for (std::size_t j = 0; j < x.size(); ++j) {
      const double variance = model.variance[c][j];
      const double delta = x[j] - model.mean[c][j];
      score += -0.5 * std::log(2.0 * M_PI * variance) -
               delta * delta / (2.0 * variance);
    }
    scores[c] = score;
  }
  return scores[1] > scores[0] ? Label::Malicious : Label::Benign;
}

LinearSvmModel linear_svm_fit(const DataView& X, std::span<const Label> y,
                              double lambda, int epochs, std::uint64_t seed) {
  require_both_classes(y, "linear svm");
  if (!(lambda > 0.0)) throw ValidationError("svm: lambda must be positive");
  if (epochs < 1) throw ValidationError("svm: epochs must be >= 1");

  const std::size_t d = X.cols();
  LinearSvmModel model;
  model.weights.assign(d, 0.0);

  std::vector<std::size_t> order(X.rows());
  std::iota(order.begin(), order.end(), 0);
  std::int64_t t = 0;
  for (int epoch = 0; epoch < epochs; ++epoch) {
    Rng rng(Rng::derive(seed, {0x5F3ull, static_cast<std::uint64_t>(epoch)}));
    rng.shuffle(order);
    for (const std::size_t i : order) {
      ++t;
      const double eta = 1.0 / (lambda * static_cast<double>(t));
      const auto row = X.row(i);
      const double target = is_malicious(y[i]) ? 1.0 : -1.0;
      double margin = model.bias;
      for (std::size_t j = 0; j < d; ++j) {
        margin += model.weights[j] * row[j];
      }
      margin *= target;
      const double decay = 1.0 - eta * lambda;
      for (std::size_t j = 0; j < d; ++j) model.weights[j] *= decay;
      if (margin < 1.0) {
        for (std::size_t j = 0; j < d; ++j) {
          model.weights[j] += eta * target * row[j];
        }
        model.bias += eta * target;
      }
    }
  }
  return model;
}

Label linear_svm_predict(const LinearSvmModel& model,
                         std::span<const double> x) {
  double score = model.bias;
  for (std::size_t j = 0; j < x.size(); ++j) {
    score += model.weights[j] * x[j];
  }
  return score > 0.0 ? Label::Malicious : Label::Benign;
}

VectorTable read_vector_csv(std::istream& in, const std::string& origin) {
  VectorTable table;
  std::string line;
  std::size_t line_number = 0;
  while (std::getline(in, line)) {
    ++line_number;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::vector<std::string> cells;
    std::size_t start = 0;
    for (;;) {
      const auto comma = line.find(',', start);
      cells.push_back(line.substr(
          start, comma == std::string::npos ? comma : comma - start));
      if (comma == std::string::npos) break;
      start = comma + 1;
    }
    if (line_number == 1) {
      if (cells.empty() || cells[0] != "app_id") {
        throw ParseError(origin + ":1: header must start with 'app_id'");
      }
      table.feature_names.assign(cells.begin() + 1, cells.end());
      continue;
    }
    if (cells.size() != table.feature_names.size() + 1) {
      throw ParseError(origin + ":" + std::to_string(line_number) +
                       ": expected " +
                       std::to_string(table.feature_names.size() + 1) +
                       " columns, got " + std::to_string(cells.size()));
    }
    table.app_ids.push_back(cells[0]);
    std::vector<double> row(table.feature_names.size());
    for (std::size_t j = 0; j < row.size(); ++j) {
      const auto& cell = cells[j + 1];
      const auto result =
          std::from_chars(cell.data(), cell.data() + cell.size(), row[j]);
      if (result.ec != std::errc{} ||
          result.ptr != cell.data() + cell.size()) {
        throw ParseError(origin + ":" + std::to_string(line_number) +
                         ": bad number '" + cell + "'");
      }
    }
    table.features.push_row(row);
  }
  if (table.features.cols == 0) {
    table.features.cols = table.feature_names.size();
  }
  return table;
}

VectorTable load_vector_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string() + " for reading");
  return read_vector_csv(in, path.string());
}

void write_vector_csv(const VectorTable& table, std::ostream& out) {
  out << "app_id";
  for (const auto& name : table.feature_names) out << ',' << name;
  out << '\n';
  for (std::size_t r = 0; r < table.features.rows; ++r) {
    out << table.app_ids[r];
    for (std::size_t c = 0; c < table.features.cols; ++c) {
      out << ',' << format_double(table.features.at(r, c));
    }
    out << '\n';
  }
}

namespace {

// Generic fold accuracy for a fit/predict pair, sharing the forest module's
// fold partition so every grid cell sees identical splits.
template <typename Fit, typename Predict>
double fold_accuracy(const DataView& X, std::span<const Label> y, int folds,
                     std::uint64_t seed, Fit fit, Predict predict) {
  const auto partition = make_folds(X.rows(), folds, seed);
  double sum = 0.0;
  for (std::size_t f = 0; f < partition.size(); ++f) {
    const auto& holdout = partition[f];
    std::vector<bool> held(X.rows(), false);
    for (const std::size_t i : holdout) held[i] = true;
    std::vector<std::size_t> train_rows;
    train_rows.reserve(X.rows() - holdout.size());
    for (std::size_t i = 0; i < X.rows(); ++i) {
      if (!held[i]) train_rows.push_back(i);
    }
    const Matrix train_X = gather_rows(X, train_rows);
    std::vector<Label> train_y;
    train_y.reserve(train_rows.size());
    for (const std::size_t i : train_rows) train_y.push_back(y[i]);

    auto model = fit(DataView(train_X), train_y, f);
    ConfusionCounts counts;
    for (const std::size_t i : holdout) {
      counts.record(y[i], predict(model, DataView(train_X), train_y, X.row(i)));
    }
    sum += accuracy(counts);
  }
  return sum / static_cast<double>(partition.size());
}

struct FittedClassifier {
  std::string hyperparam;
  double cv_accuracy = 0.0;
  std::function<Label(std::span<const double>)> predict;
};

FittedClassifier fit_knn(const DataView& X, std::span<const Label> y,
                         const ClassifierSpec& spec) {
  int best_k = 0;
  double best_accuracy = -1.0;
  for (const int k : spec.knn_k_grid) {
    if (static_cast<std::size_t>(k) >= X.rows()) continue;
    const double score = fold_accuracy(
        X, y, spec.folds, spec.seed,
        [](const DataView&, std::span<const Label>, std::size_t) {
          return 0;
        },
        [k](int, const DataView& train_X, std::span<const Label> train_y,
            std::span<const double> x) {
          return knn_predict(train_X, train_y, x,
                             std::min<int>(k,
                                           static_cast<int>(train_X.rows())));
        });
    if (score > best_accuracy) {
      best_accuracy = score;
      best_k = k;
    }
  }
  if (best_k == 0) {
    throw ValidationError("knn: every grid value of k exceeds the training "
                          "set size");
  }
  FittedClassifier fitted;
  fitted.hyperparam = "k=" + std::to_string(best_k);
  fitted.cv_accuracy = best_accuracy;
  // Copy the training set into the closure; the table may outlive the caller.
  auto train_X = std::make_shared<Matrix>(gather_rows(
      X, [&] {
        std::vector<std::size_t> all(X.rows());
        std::iota(all.begin(), all.end(), 0);
        return all;
      }()));
  auto train_y = std::make_shared<std::vector<Label>>(y.begin(), y.end());
  fitted.predict = [train_X, train_y, best_k](std::span<const double> x) {
    return knn_predict(DataView(*train_X), *train_y, x, best_k);
  };
  return fitted;
}

FittedClassifier fit_rf(const DataView& X, std::span<const Label> y,
                        const ClassifierSpec& spec) {
  int best_trees = 0;
  double best_accuracy = -1.0;
  for (const int trees : spec.rf_trees_grid) {
    const double score =
        cross_validate(X, y, trees, std::nullopt, spec.folds, spec.seed);
    if (score > best_accuracy) {
      best_accuracy = score;
      best_trees = trees;
    }
  }
  FittedClassifier fitted;
  fitted.hyperparam = "trees=" + std::to_string(best_trees);
  fitted.cv_accuracy = best_accuracy;
  auto forest = std::make_shared<RandomForest>(
      fit_forest(X, y, best_trees, std::nullopt,
                 Rng::derive(spec.seed, {0xD0F7ull})));
  fitted.predict = [forest](std::span<const double> x) {
    return forest->predict(x);
  };
  return fitted;
}

}  // namespace

std::vector<DownstreamResult> downstream_experiment(
    const VectorTable& train, const Snapshot& train_reports,
    const LabelingStrategy& strategy, const VectorTable& test,
    const GroundTruth& test_truth, const ClassifierSpec& spec,
    std::span<const ClassifierKind> kinds) {
  if (train.features.rows == 0 || test.features.rows == 0) {
    throw ValidationError("downstream experiment needs non-empty vectors");
  }
  if (train.features.cols != test.features.cols) {
    throw ValidationError("train and test vectors differ in width");
  }

  // Phase 1: the labeling strategy labels the training vectors through
  // their scan reports.
  std::vector<Label> train_labels;
  train_labels.reserve(train.app_ids.size());
  for (const auto& app_id : train.app_ids) {
    const auto it = train_reports.reports.find(app_id);
    if (it == train_reports.reports.end()) {
      throw ValidationError("training vector app " + app_id +
                            " has no scan report in the snapshot");
    }
    train_labels.push_back(strategy.label(it->second, train_reports.date));
  }
  const bool has_benign =
      std::any_of(train_labels.begin(), train_labels.end(),
                  [](Label l) { return !is_malicious(l); });
  const bool has_malicious =
      std::any_of(train_labels.begin(), train_labels.end(),
                  [](Label l) { return is_malicious(l); });
  if (!has_benign || !has_malicious) {
    throw ValidationError("strategy '" + strategy.name() +
                          "' labeled the training set single-class; no "
                          "classifier can be trained");
  }

  std::vector<Label> test_labels;
  test_labels.reserve(test.app_ids.size());
  for (const auto& app_id : test.app_ids) {
    const auto it = test_truth.labels.find(app_id);
    if (it == test_truth.labels.end()) {
      throw ValidationError("test vector app " + app_id +
                            " is missing from the ground truth");
    }
    test_labels.push_back(it->second);
  }

  const DataView train_view(train.features);
  std::vector<DownstreamResult> results;
  for (const ClassifierKind kind : kinds) {
    FittedClassifier fitted;
    switch (kind) {
      case ClassifierKind::Knn:
        fitted = fit_knn(train_view, train_labels, spec);
        break;
      case ClassifierKind::RandomForestClassifier:
        fitted = fit_rf(train_view, train_labels, spec);
        break;
      case ClassifierKind::Gnb: {
        auto model = std::make_shared<GnbModel>(
            gnb_fit(train_view, train_labels));
        fitted.predict = [model](std::span<const double> x) {
          return gnb_predict(*model, x);
        };
        break;
      }
      case ClassifierKind::LinearSvm: {
        auto model = std::make_shared<LinearSvmModel>(
            linear_svm_fit(train_view, train_labels, spec.svm_lambda,
                           spec.svm_epochs, spec.seed));
        fitted.hyperparam = "lambda=" + format_double(spec.svm_lambda) +
                            ",epochs=" + std::to_string(spec.svm_epochs);
        fitted.predict = [model](std::span<const double> x) {
          return linear_svm_predict(*model, x);
        };
        break;
      }
    }

    DownstreamResult result;
    result.kind = kind;
    result.hyperparam = fitted.hyperparam;
    result.cv_accuracy = fitted.cv_accuracy;
    for (std::size_t i = 0; i < test.features.rows; ++i) {
      result.counts.record(test_labels[i],
                           fitted.predict(test.features.row(i)));
    }
    result.mcc = mcc(result.counts);
    result.accuracy = accuracy(result.counts);
    results.push_back(std::move(result));
  }
  return results;
}

}  // namespace maat
