#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "dsnn/encoding.hpp"
#include "dsnn/rng.hpp"
#include "json.hpp"

namespace dsnn {

// ---------------------------------------------------------------------------
// Raw ingestion
// ---------------------------------------------------------------------------

enum class ColumnKind { numeric, categorical };

struct ColumnSpec {
  std::string name;
  ColumnKind kind = ColumnKind::numeric;
};

struct CsvSchema {
  std::vector<ColumnSpec> columns;  // feature columns, in file order
  std::string label_column;         // binary attack flag (0/1)
  std::string category_column;      // attack category string
  std::string benign_category = "Normal";
  bool has_header = true;

  size_t feature_count() const { return columns.size(); }
  void validate() const;
};

// One parsed flow: numerics and categoricals split per the schema, plus the
// binary label and the category tag.
struct FlowRecord {
  std::vector<double> numeric_values;        // schema numeric columns, in order
  std::vector<std::string> categorical_values;  // schema categorical columns, in order
  bool is_attack = false;
  std::string category;  // empty / benign tag for benign flows

  bool operator==(const FlowRecord&) const = default;
};

struct LoadReport {
  size_t parsed = 0;
  size_t skipped = 0;
  std::vector<std::string> warnings;
};

struct LoadResult {
  std::vector<FlowRecord> records;
  LoadReport report;
};

// Parses the given CSVs against the schema. Malformed rows (wrong column
// count, non-numeric values in numeric columns) are counted and skipped.
LoadResult load_csv(const std::vector<std::string>& paths, const CsvSchema& schema);

// Inverse of load_csv for one file; used for cacheing and round-trip tests.
std::string records_to_csv(const std::vector<FlowRecord>& records, const CsvSchema& schema);

// ---------------------------------------------------------------------------
// Preprocessing
// ---------------------------------------------------------------------------

// Stable value -> integer code dictionaries for the categorical columns,
// built from sorted unique training values. Unseen values encode one past
// the largest code so min-max clamping maps them to 1.
struct CategoricalDicts {
  std::vector<std::map<std::string, int>> per_column;

  nlohmann::json to_json() const;
  static CategoricalDicts from_json(const nlohmann::json& j);
};

struct Preprocessed {
  std::vector<FeatureVector> features;  // scaled, retained columns only
  std::vector<int> class_ids;           // registry index per row (0 = benign)
  ScalingStats stats;
  CategoricalDicts dicts;
  std::vector<std::string> feature_names;  // retained, in output order
};

// Integer-encodes categoricals, retains exactly the named feature columns,
// min-max scales. When `fitted` is empty, stats and dictionaries are fitted
// on `records` (training); otherwise the supplied ones are applied as-is.
// class_of maps a record to its registry id (benign = 0); records mapped to
// a negative id are dropped as unknown-category.
struct FittedPreprocess {
  ScalingStats stats;
  CategoricalDicts dicts;
};

Preprocessed preprocess(const std::vector<FlowRecord>& records,
                        const std::vector<std::string>& feature_list, const CsvSchema& schema,
                        const std::vector<std::string>& class_registry,
                        const std::optional<FittedPreprocess>& fitted = std::nullopt);

// Fallback selector when no feature list is supplied: ranks encoded columns
// by variance on the training records and keeps the top k names.
std::vector<std::string> select_features_by_variance(const std::vector<FlowRecord>& records,
                                                     const CsvSchema& schema, size_t k);

// ---------------------------------------------------------------------------
// Splits and tasks
// ---------------------------------------------------------------------------

struct DatasetSplit {
  std::vector<size_t> train;
  std::vector<size_t> validation;
  std::vector<size_t> test;
};

// Stratified 8:1:1 split by class id with a seeded shuffle. Every class
// needs at least 10 rows.
DatasetSplit split_8_1_1(const std::vector<int>& class_ids, uint64_t seed);

struct TaskStream {
  std::vector<size_t> benign;   // indices into the source rows
  std::vector<size_t> attacks;  // indices of this task's attack classes only
};

// Task t = a fresh disjoint slice of the benign pool plus the attack samples
// of group t. Groups must be disjoint; classes outside every group (the
// excluded set) appear in no task.
std::vector<TaskStream> make_tasks(const std::vector<int>& class_ids,
                                   const std::vector<size_t>& pool,
                                   const std::vector<std::vector<int>>& class_groups,
                                   uint64_t seed);

// ---------------------------------------------------------------------------
// Synthetic streams
// ---------------------------------------------------------------------------

struct ClusterSpec {
  FeatureVector centroid;  // in [0,1]^D
  double spread = 0.02;
  int class_id = 0;
  size_t count = 0;
};

struct SynthStream {
  std::vector<FeatureVector> features;
  std::vector<int> class_ids;
};

// Seeded Gaussian clusters clipped to the unit cube.
SynthStream synth_generate(const std::vector<ClusterSpec>& clusters, uint64_t seed);

// Brute-force nearest-centroid accuracy; the separability certificate for
// synthetic protocols.
double nearest_centroid_accuracy(const SynthStream& stream,
                                 const std::vector<ClusterSpec>& clusters);

}  // namespace dsnn
