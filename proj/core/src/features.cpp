#include "maat/features.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <ostream>

#include <json.hpp>

#include "maat/errors.hpp"
#include "maat/forest.hpp"

namespace maat {

namespace {

constexpr const char* kAttrNames[] = {"age_years", "times_submitted",
                                      "positives", "total"};

std::string format_double(double value) {
  char buffer[32];
  const auto result = std::to_chars(buffer, buffer + sizeof(buffer), value);
  return std::string(buffer, result.ptr);
}

}  // namespace

std::vector<std::string> FeatureSchema::names() const {
  std::vector<std::string> result;
  result.reserve(entries.size());
  for (const auto& entry : entries) result.push_back(entry.name);
  return result;
}

FeatureSchema build_naive_schema(const TimeSeriesCorpus& corpus) {
  const auto scanners = scanner_names(corpus);
  if (scanners.empty()) {
    throw ValidationError("naive schema: corpus names no scanners");
  }
  FeatureSchema schema;
  schema.provenance = SchemaProvenance::Naive;
  for (const auto& scanner : scanners) {
    schema.entries.push_back({scanner, FeatureKind::ScannerVerdict});
  }
  return schema;
}

FeatureVector extract_naive(const ScanReport& report,
                            const FeatureSchema& schema) {
  if (schema.provenance != SchemaProvenance::Naive) {
    throw ValidationError("extract_naive needs a naive schema");
  }
  FeatureVector vector;
  vector.values.reserve(schema.entries.size());
  for (const auto& entry : schema.entries) {
    vector.values.push_back(
        static_cast<double>(verdict_value(verdict_of(report, entry.name))));
  }
  return vector;
}

FeatureSchema build_engineered_schema(const TimeSeriesCorpus& corpus,
                                      const std::set<std::string>& trusted) {
  if (corpus.snapshots.empty()) {
    throw ValidationError("engineered schema: corpus is empty");
  }
  if (trusted.empty()) {
    emit_warning("engineered schema built with an empty trusted-scanner set; "
                 "only report attributes and vocabulary features remain");
  }
  FeatureSchema schema;
  schema.provenance = SchemaProvenance::Engineered;
  for (const auto& scanner : trusted) {
    schema.entries.push_back({scanner, FeatureKind::ScannerVerdict});
  }
  for (const char* name : kAttrNames) {
    schema.entries.push_back({name, FeatureKind::ReportAttr});
  }
  std::set<std::string> permissions;
  std::set<std::string> tags;
  for (const auto& snapshot : corpus.snapshots) {
    for (const auto& [app_id, report] : snapshot.reports) {
      permissions.insert(report.permissions.begin(), report.permissions.end());
      tags.insert(report.tags.begin(), report.tags.end());
    }
  }
  for (const auto& permission : permissions) {
    schema.entries.push_back({permission, FeatureKind::Permission});
  }
  for (const auto& tag : tags) {
    schema.entries.push_back({tag, FeatureKind::Tag});
  }
  return schema;
}

FeatureVector extract_engineered(const ScanReport& report,
                                 const FeatureSchema& schema, Date as_of) {
  if (schema.provenance != SchemaProvenance::Engineered) {
    throw ValidationError("extract_engineered needs an engineered schema");
  }
  FeatureVector vector;
  vector.values.reserve(schema.entries.size());
  for (const auto& entry : schema.entries) {
    switch (entry.kind) {
      case FeatureKind::ScannerVerdict:
        vector.values.push_back(static_cast<double>(
            verdict_value(verdict_of(report, entry.name))));
        break;
      case FeatureKind::ReportAttr:
        if (entry.name == "age_years") {
          vector.values.push_back(report_age_years(report, as_of));
        } else if (entry.name == "times_submitted") {
          vector.values.push_back(
              static_cast<double>(report.times_submitted));
        } else if (entry.name == "positives") {
          vector.values.push_back(static_cast<double>(report.positives));
        } else if (entry.name == "total") {
          vector.values.push_back(static_cast<double>(report.total));
        } else {
          throw ValidationError("unknown report attribute '" + entry.name +
                                "' in schema");
        }
        break;
      case FeatureKind::Permission:
        vector.values.push_back(
            report.permissions.contains(entry.name) ? 1.0 : 0.0);
        break;
      case FeatureKind::Tag:
        vector.values.push_back(report.tags.contains(entry.name) ? 1.0 : 0.0);
        break;
    }
  }
  return vector;
}

FeatureVector extract(const ScanReport& report, const FeatureSchema& schema,
                      Date as_of) {
  return schema.provenance == SchemaProvenance::Naive
             ? extract_naive(report, schema)
             : extract_engineered(report, schema, as_of);
}

FeatureSchema select_features(const FeatureSchema& schema, const DataView& X,
                              std::span<const Label> y,
                              double importance_cutoff, std::uint64_t seed) {
  if (X.rows() < 2 || X.rows() != y.size()) {
    throw ValidationError("feature selection needs >= 2 labeled rows");
  }
  if (X.cols() != schema.size()) {
    throw ValidationError("feature selection: matrix width " +
                          std::to_string(X.cols()) +
                          " does not match schema size " +
                          std::to_string(schema.size()));
  }
  const bool has_benign = std::any_of(y.begin(), y.end(), [](Label l) {
    return !is_malicious(l);
  });
  const bool has_malicious = std::any_of(y.begin(), y.end(), is_malicious);
  if (!has_benign || !has_malicious) {
    throw ValidationError("feature selection needs both classes present");
  }

  Rng rng(Rng::derive(seed, {0x5E1Ec7ull}));
  const DecisionTree selector = fit_tree(X, y, TreeFitOptions{}, rng);

  FeatureSchema selected;
  selected.provenance = schema.provenance;
  selected.as_of_policy = schema.as_of_policy;
  for (std::size_t i = 0; i < schema.entries.size(); ++i) {
    if (selector.importances()[i] > importance_cutoff) {
      selected.entries.push_back(schema.entries[i]);
    }
  }
  return selected;
}

std::vector<std::size_t> schema_projection(const FeatureSchema& parent,
                                           const FeatureSchema& selected) {
  std::vector<std::size_t> projection;
  projection.reserve(selected.entries.size());
  std::size_t cursor = 0;
  for (const auto& entry : selected.entries) {
    while (cursor < parent.entries.size() &&
           !(parent.entries[cursor] == entry)) {
      ++cursor;
    }
    if (cursor == parent.entries.size()) {
      throw ValidationError("selected schema is not an ordered subset of the "
                            "parent schema");
    }
    projection.push_back(cursor++);
  }
  return projection;
}

std::string_view to_string(FeatureKind kind) {
  switch (kind) {
    case FeatureKind::ScannerVerdict: return "scanner_verdict";
    case FeatureKind::ReportAttr: return "report_attr";
    case FeatureKind::Permission: return "permission";
    case FeatureKind::Tag: return "tag";
  }
  return "scanner_verdict";
}

FeatureKind feature_kind_from_string(std::string_view text) {
  if (text == "scanner_verdict") return FeatureKind::ScannerVerdict;
  if (text == "report_attr") return FeatureKind::ReportAttr;
  if (text == "permission") return FeatureKind::Permission;
  if (text == "tag") return FeatureKind::Tag;
  throw ParseError("unknown feature kind '" + std::string(text) + "'");
}

std::string_view to_string(SchemaProvenance provenance) {
  return provenance == SchemaProvenance::Naive ? "naive" : "engineered";
}

SchemaProvenance provenance_from_string(std::string_view text) {
  if (text == "naive") return SchemaProvenance::Naive;
  if (text == "engineered") return SchemaProvenance::Engineered;
  throw ParseError("unknown schema provenance '" + std::string(text) + "'");
}

void write_schema(const FeatureSchema& schema, std::ostream& out) {
  nlohmann::ordered_json object;
  object["provenance"] = std::string(to_string(schema.provenance));
  auto entries = nlohmann::ordered_json::array();
  for (const auto& entry : schema.entries) {
    entries.push_back({{"name", entry.name},
                       {"kind", std::string(to_string(entry.kind))}});
  }
  object["entries"] = std::move(entries);
  out << object.dump(2) << '\n';
}

void save_schema(const FeatureSchema& schema,
                 const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  write_schema(schema, out);
}

FeatureSchema read_schema(std::istream& in) {
  nlohmann::ordered_json object;
  try {
    object = nlohmann::ordered_json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(std::string("schema JSON: ") + e.what());
  }
  FeatureSchema schema;
  schema.provenance =
      provenance_from_string(object.at("provenance").get<std::string>());
  for (const auto& entry : object.at("entries")) {
    schema.entries.push_back(
        {entry.at("name").get<std::string>(),
         feature_kind_from_string(entry.at("kind").get<std::string>())});
  }
  return schema;
}

FeatureSchema load_schema(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string() + " for reading");
  return read_schema(in);
}

void write_matrix_csv(const FeatureSchema& schema, const DataView& X,
                      std::span<const Label> labels, std::ostream& out) {
  if (!labels.empty() && labels.size() != X.rows()) {
    throw ValidationError("matrix CSV: label count does not match row count");
  }
  bool first = true;
  for (const auto& entry : schema.entries) {
    if (!first) out << ',';
    out << entry.name;
    first = false;
  }
  if (!labels.empty()) out << ",label";
  out << '\n';
  for (std::size_t r = 0; r < X.rows(); ++r) {
    for (std::size_t c = 0; c < X.cols(); ++c) {
      if (c > 0) out << ',';
      out << format_double(X.at(r, c));
    }
    if (!labels.empty()) out << ',' << to_string(labels[r]);
    out << '\n';
  }
}

}  // namespace maat
