#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "maat/matrix.hpp"
#include "maat/report.hpp"

namespace maat {

enum class FeatureKind { ScannerVerdict, ReportAttr, Permission, Tag };
enum class SchemaProvenance { Naive, Engineered };

/// Where the age reference date comes from: each snapshot's date while
/// building training rows, the labeling request date at inference.
enum class AgePolicy { SnapshotDate, RequestDate };

struct FeatureEntry {
  std::string name;
  FeatureKind kind;

  friend bool operator==(const FeatureEntry&, const FeatureEntry&) = default;
};

/// Ordered feature catalog. The order is fixed at construction and travels
/// with any trained model.
struct FeatureSchema {
  SchemaProvenance provenance = SchemaProvenance::Naive;
  std::vector<FeatureEntry> entries;
  AgePolicy as_of_policy = AgePolicy::SnapshotDate;

  std::size_t size() const { return entries.size(); }
  std::vector<std::string> names() const;

  friend bool operator==(const FeatureSchema& a, const FeatureSchema& b) {
    return a.provenance == b.provenance && a.entries == b.entries;
  }
};

struct FeatureVector {
  std::vector<double> values;
  std::optional<Label> label;
};

/// One scanner_verdict entry per scanner name in the union over all
/// snapshots, sorted lexicographically. Errors if no scanner names exist.
FeatureSchema build_naive_schema(const TimeSeriesCorpus& corpus);

/// Verdicts encoded -1/0/1 per schema entry; scanners in the report but not
/// in the schema are ignored.
FeatureVector extract_naive(const ScanReport& report,
                            const FeatureSchema& schema);

/// Trusted scanner verdicts (sorted), then the report attributes age_years,
/// times_submitted, positives, total, then one 0/1 entry per permission and
/// tag observed anywhere in the corpus (each sorted). Warns when trusted is
/// empty.
FeatureSchema build_engineered_schema(const TimeSeriesCorpus& corpus,
                                      const std::set<std::string>& trusted);

/// Verdicts via verdict_of, age via report_age_years(report, as_of),
/// attributes copied, permissions/tags as membership indicators. Unknown
/// permissions and tags on the report are dropped.
FeatureVector extract_engineered(const ScanReport& report,
                                 const FeatureSchema& schema, Date as_of);

/// Dispatches on schema provenance.
FeatureVector extract(const ScanReport& report, const FeatureSchema& schema,
                      Date as_of);

/// Fits one unbounded-depth CART tree on (X, y) and keeps the features whose
/// importance exceeds importance_cutoff, preserving schema order. Requires
/// both classes present.
FeatureSchema select_features(const FeatureSchema& schema, const DataView& X,
                              std::span<const Label> y,
                              double importance_cutoff = 1e-5,
                              std::uint64_t seed = 0);

/// Column indices of the selected sub-schema within the parent schema.
std::vector<std::size_t> schema_projection(const FeatureSchema& parent,
                                           const FeatureSchema& selected);

std::string_view to_string(FeatureKind kind);
FeatureKind feature_kind_from_string(std::string_view text);
std::string_view to_string(SchemaProvenance provenance);
SchemaProvenance provenance_from_string(std::string_view text);

/// JSON {provenance, entries: [{name, kind}]}.
void save_schema(const FeatureSchema& schema, const std::filesystem::path&);
void write_schema(const FeatureSchema& schema, std::ostream& out);
FeatureSchema load_schema(const std::filesystem::path& path);
FeatureSchema read_schema(std::istream& in);

/// CSV whose header is the schema names, plus a trailing "label" column when
/// labels are provided (must then match the row count).
void write_matrix_csv(const FeatureSchema& schema, const DataView& X,
                      std::span<const Label> labels, std::ostream& out);

}  // namespace maat
