#include "dsnn/data.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>

namespace dsnn {

void CsvSchema::validate() const {
  if (columns.empty()) throw std::invalid_argument("schema: no feature columns");
  if (label_column.empty()) throw std::invalid_argument("schema: label column missing");
  if (category_column.empty()) throw std::invalid_argument("schema: category column missing");
  std::set<std::string> seen;
  for (const auto& c : columns)
    if (!seen.insert(c.name).second)
      throw std::invalid_argument("schema: duplicate column name " + c.name);
}

namespace {

// Minimal CSV field splitter; handles quoted fields with embedded commas.
std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> fields;
  std::string field;
  bool quoted = false;
  for (size_t i = 0; i < line.size(); ++i) {
    const char ch = line[i];
    if (quoted) {
      if (ch == '"') {
        if (i + 1 < line.size() && line[i + 1] == '"') {
          field += '"';
          ++i;
        } else {
          quoted = false;
        }
      } else {
        field += ch;
      }
    } else if (ch == '"') {
      quoted = true;
    } else if (ch == ',') {
      fields.push_back(field);
      field.clear();
    } else if (ch != '\r') {
      field += ch;
    }
  }
  fields.push_back(field);
  return fields;
}

bool parse_double(const std::string& s, double& out) {
  if (s.empty()) return false;
  try {
    size_t pos = 0;
    out = std::stod(s, &pos);
    while (pos < s.size() && std::isspace(static_cast<unsigned char>(s[pos]))) ++pos;
    return pos == s.size() && std::isfinite(out);
  } catch (const std::exception&) {
    return false;
  }
}

}  // namespace

LoadResult load_csv(const std::vector<std::string>& paths, const CsvSchema& schema) {
  schema.validate();
  LoadResult result;

  // full file layout: feature columns in order, then label and category
  // columns located by name
  std::vector<std::string> expected_names;
  for (const auto& c : schema.columns) expected_names.push_back(c.name);

  for (const auto& path : paths) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("load_csv: cannot open " + path);

    std::string line;
    std::vector<int> feature_pos(schema.columns.size(), -1);
    int label_pos = -1, category_pos = -1;
    bool have_layout = false;

    if (schema.has_header) {
      if (!std::getline(in, line)) {
        result.report.warnings.push_back("empty file: " + path);
        continue;
      }
      const auto header = split_csv_line(line);
      for (size_t c = 0; c < schema.columns.size(); ++c) {
        auto it = std::find(header.begin(), header.end(), schema.columns[c].name);
        if (it == header.end())
          throw std::runtime_error("load_csv: column '" + schema.columns[c].name +
                                   "' missing from " + path);
        feature_pos[c] = static_cast<int>(it - header.begin());
      }
      auto lit = std::find(header.begin(), header.end(), schema.label_column);
      auto cit = std::find(header.begin(), header.end(), schema.category_column);
      if (lit == header.end() || cit == header.end())
        throw std::runtime_error("load_csv: label/category column missing from " + path);
      label_pos = static_cast<int>(lit - header.begin());
      category_pos = static_cast<int>(cit - header.begin());
      have_layout = true;
    } else {
      // headerless: features in schema order, then category, then label
      for (size_t c = 0; c < schema.columns.size(); ++c) feature_pos[c] = static_cast<int>(c);
      category_pos = static_cast<int>(schema.columns.size());
      label_pos = static_cast<int>(schema.columns.size()) + 1;
      have_layout = true;
    }

    int max_pos = std::max(label_pos, category_pos);
    for (int p : feature_pos) max_pos = std::max(max_pos, p);
    const size_t needed = static_cast<size_t>(max_pos) + 1;

    size_t parsed_before = result.report.parsed;
    while (std::getline(in, line)) {
      if (line.empty()) continue;
      const auto fields = split_csv_line(line);
      if (!have_layout || fields.size() < needed) {
        ++result.report.skipped;
        continue;
      }

      FlowRecord rec;
      bool ok = true;
      for (size_t c = 0; c < schema.columns.size(); ++c) {
        const std::string& raw = fields[static_cast<size_t>(feature_pos[c])];
        if (schema.columns[c].kind == ColumnKind::numeric) {
          double v = 0.0;
          if (!parse_double(raw, v)) {
            ok = false;
            break;
          }
          rec.numeric_values.push_back(v);
        } else {
          rec.categorical_values.push_back(raw);
        }
      }
      if (!ok) {
        ++result.report.skipped;
        continue;
      }

      const std::string& label_raw = fields[static_cast<size_t>(label_pos)];
      double label_val = 0.0;
      if (!parse_double(label_raw, label_val) || (label_val != 0.0 && label_val != 1.0)) {
        ++result.report.skipped;
        continue;
      }
      rec.is_attack = label_val == 1.0;
      rec.category = fields[static_cast<size_t>(category_pos)];
      if (rec.is_attack && (rec.category.empty() || rec.category == schema.benign_category)) {
        ++result.report.skipped;  // attack rows must carry a category
        continue;
      }
      if (!rec.is_attack) rec.category = schema.benign_category;

      result.records.push_back(std::move(rec));
      ++result.report.parsed;
    }
    if (result.report.parsed == parsed_before)
      result.report.warnings.push_back("no records parsed from: " + path);
  }
  return result;
}

std::string records_to_csv(const std::vector<FlowRecord>& records, const CsvSchema& schema) {
  std::ostringstream os;
  os.precision(17);
  if (schema.has_header) {
    for (const auto& c : schema.columns) os << c.name << ',';
    os << schema.category_column << ',' << schema.label_column << '\n';
  }
  for (const auto& rec : records) {
    size_t num_i = 0, cat_i = 0;
    for (const auto& c : schema.columns) {
      if (c.kind == ColumnKind::numeric)
        os << rec.numeric_values[num_i++] << ',';
      else
        os << rec.categorical_values[cat_i++] << ',';
    }
    os << rec.category << ',' << (rec.is_attack ? 1 : 0) << '\n';
  }
  return os.str();
}

nlohmann::json CategoricalDicts::to_json() const {
  nlohmann::json arr = nlohmann::json::array();
  for (const auto& d : per_column) arr.push_back(d);
  return arr;
}

CategoricalDicts CategoricalDicts::from_json(const nlohmann::json& j) {
  CategoricalDicts d;
  for (const auto& m : j) d.per_column.push_back(m.get<std::map<std::string, int>>());
  return d;
}

namespace {

// Encoded full-width row (categoricals as dictionary codes), schema order.
std::vector<double> encode_row(const FlowRecord& rec, const CsvSchema& schema,
                               const CategoricalDicts& dicts) {
  std::vector<double> row;
  row.reserve(schema.columns.size());
  size_t num_i = 0, cat_i = 0, dict_i = 0;
  for (const auto& c : schema.columns) {
    if (c.kind == ColumnKind::numeric) {
      row.push_back(rec.numeric_values[num_i++]);
    } else {
      const auto& dict = dicts.per_column[dict_i];
      auto it = dict.find(rec.categorical_values[cat_i]);
      // unseen value -> one past the largest code; clamping maps it to 1
      row.push_back(it != dict.end() ? static_cast<double>(it->second)
                                     : static_cast<double>(dict.size()));
      ++cat_i;
      ++dict_i;
    }
  }
  return row;
}

CategoricalDicts fit_dicts(const std::vector<FlowRecord>& records, const CsvSchema& schema) {
  size_t cat_columns = 0;
  for (const auto& c : schema.columns)
    if (c.kind == ColumnKind::categorical) ++cat_columns;

  std::vector<std::set<std::string>> values(cat_columns);
  for (const auto& rec : records) {
    for (size_t k = 0; k < cat_columns; ++k) values[k].insert(rec.categorical_values[k]);
  }
  CategoricalDicts dicts;
  dicts.per_column.resize(cat_columns);
  for (size_t k = 0; k < cat_columns; ++k) {
    int code = 0;
    for (const auto& v : values[k]) dicts.per_column[k][v] = code++;
  }
  return dicts;
}

}  // namespace

Preprocessed preprocess(const std::vector<FlowRecord>& records,
                        const std::vector<std::string>& feature_list, const CsvSchema& schema,
                        const std::vector<std::string>& class_registry,
                        const std::optional<FittedPreprocess>& fitted) {
  schema.validate();
  if (records.empty()) throw std::invalid_argument("preprocess: no records");
  if (feature_list.empty()) throw std::invalid_argument("preprocess: empty feature list");

  std::vector<size_t> keep;
  for (const auto& name : feature_list) {
    auto it = std::find_if(schema.columns.begin(), schema.columns.end(),
                           [&](const ColumnSpec& c) { return c.name == name; });
    if (it == schema.columns.end())
      throw std::invalid_argument("preprocess: unknown feature name '" + name + "'");
    keep.push_back(static_cast<size_t>(it - schema.columns.begin()));
  }

  Preprocessed out;
  out.feature_names = feature_list;
  out.dicts = fitted ? fitted->dicts : fit_dicts(records, schema);

  // class registry lookup; unknown categories drop the row
  auto class_of = [&](const FlowRecord& rec) -> int {
    const std::string& tag = rec.is_attack ? rec.category : schema.benign_category;
    auto it = std::find(class_registry.begin(), class_registry.end(), tag);
    return it == class_registry.end() ? -1 : static_cast<int>(it - class_registry.begin());
  };

  std::vector<std::vector<double>> retained_rows;
  std::vector<int> classes;
  for (const auto& rec : records) {
    const int cid = class_of(rec);
    if (cid < 0) continue;
    const auto full = encode_row(rec, schema, out.dicts);
    std::vector<double> row(keep.size());
    for (size_t k = 0; k < keep.size(); ++k) row[k] = full[keep[k]];
    retained_rows.push_back(std::move(row));
    classes.push_back(cid);
  }
  if (retained_rows.empty())
    throw std::invalid_argument("preprocess: every record had an unknown category");

  if (fitted) {
    out.stats = fitted->stats;
    if (out.stats.columns() != keep.size())
      throw std::invalid_argument("preprocess: fitted stats width mismatch");
  } else {
    out.stats = fit_scaling(retained_rows);
    out.stats.retained = keep;
  }

  out.features.reserve(retained_rows.size());
  for (const auto& row : retained_rows) out.features.push_back(normalize(row, out.stats));
  out.class_ids = std::move(classes);
  return out;
}

std::vector<std::string> select_features_by_variance(const std::vector<FlowRecord>& records,
                                                     const CsvSchema& schema, size_t k) {
  if (records.empty()) throw std::invalid_argument("feature selection: no records");
  const auto dicts = fit_dicts(records, schema);

  const size_t cols = schema.columns.size();
  std::vector<double> mean(cols, 0.0), m2(cols, 0.0);
  size_t n = 0;
  for (const auto& rec : records) {
    const auto row = encode_row(rec, schema, dicts);
    ++n;
    for (size_t c = 0; c < cols; ++c) {
      const double d = row[c] - mean[c];
      mean[c] += d / static_cast<double>(n);
      m2[c] += d * (row[c] - mean[c]);
    }
  }

  std::vector<size_t> order(cols);
  for (size_t c = 0; c < cols; ++c) order[c] = c;
  std::stable_sort(order.begin(), order.end(), [&](size_t a, size_t b) { return m2[a] > m2[b]; });

  std::vector<std::string> names;
  for (size_t i = 0; i < std::min(k, cols); ++i) names.push_back(schema.columns[order[i]].name);
  return names;
}

DatasetSplit split_8_1_1(const std::vector<int>& class_ids, uint64_t seed) {
  std::map<int, std::vector<size_t>> by_class;
  for (size_t i = 0; i < class_ids.size(); ++i) by_class[class_ids[i]].push_back(i);

  DatasetSplit split;
  Rng rng(seed);
  for (auto& [cid, idx] : by_class) {
    if (idx.size() < 10)
      throw std::invalid_argument("split_8_1_1: class " + std::to_string(cid) +
                                  " has fewer than 10 samples");
    // Fisher-Yates with the shared seeded stream; iteration order over the
    // ordered map is deterministic
    for (size_t i = idx.size() - 1; i > 0; --i) {
      const size_t j = static_cast<size_t>(rng.next_u64() % (i + 1));
      std::swap(idx[i], idx[j]);
    }
    const size_t n = idx.size();
    const size_t n_train = static_cast<size_t>(std::floor(0.8 * static_cast<double>(n)));
    const size_t n_val = static_cast<size_t>(std::floor(0.1 * static_cast<double>(n)));
    for (size_t i = 0; i < n; ++i) {
      if (i < n_train)
        split.train.push_back(idx[i]);
      else if (i < n_train + n_val)
        split.validation.push_back(idx[i]);
      else
        split.test.push_back(idx[i]);
    }
  }
  std::sort(split.train.begin(), split.train.end());
  std::sort(split.validation.begin(), split.validation.end());
  std::sort(split.test.begin(), split.test.end());
  return split;
}

std::vector<TaskStream> make_tasks(const std::vector<int>& class_ids,
                                   const std::vector<size_t>& pool,
                                   const std::vector<std::vector<int>>& class_groups,
                                   uint64_t seed) {
  if (class_groups.empty()) throw std::invalid_argument("make_tasks: no class groups");
  std::set<int> seen;
  for (const auto& group : class_groups)
    for (int c : group) {
      if (c == 0) throw std::invalid_argument("make_tasks: class 0 is the benign pool");
      if (!seen.insert(c).second)
        throw std::invalid_argument("make_tasks: overlapping class groups");
    }

  std::vector<size_t> benign;
  for (size_t i : pool)
    if (class_ids[i] == 0) benign.push_back(i);

  Rng rng(seed);
  for (size_t i = benign.size(); i > 1; --i) {
    const size_t j = static_cast<size_t>(rng.next_u64() % i);
    std::swap(benign[i - 1], benign[j]);
  }

  // fresh disjoint benign slice per task
  const size_t tasks = class_groups.size();
  const size_t slice = benign.size() / tasks;

  std::vector<TaskStream> out(tasks);
  for (size_t t = 0; t < tasks; ++t) {
    const size_t begin = t * slice;
    const size_t end = (t + 1 == tasks) ? benign.size() : begin + slice;
    out[t].benign.assign(benign.begin() + static_cast<ptrdiff_t>(begin),
                         benign.begin() + static_cast<ptrdiff_t>(end));
    std::sort(out[t].benign.begin(), out[t].benign.end());
    for (size_t i : pool) {
      const int cid = class_ids[i];
      if (std::find(class_groups[t].begin(), class_groups[t].end(), cid) !=
          class_groups[t].end())
        out[t].attacks.push_back(i);
    }
  }
  return out;
}

SynthStream synth_generate(const std::vector<ClusterSpec>& clusters, uint64_t seed) {
  SynthStream stream;
  Rng rng(seed);
  for (const auto& cluster : clusters) {
    if (cluster.count == 0) throw std::invalid_argument("synth_generate: non-positive count");
    for (double v : cluster.centroid)
      if (v < 0.0 || v > 1.0)
        throw std::invalid_argument("synth_generate: centroid outside the unit cube");
    for (size_t k = 0; k < cluster.count; ++k) {
      FeatureVector x(cluster.centroid.size());
      for (size_t d = 0; d < x.size(); ++d) {
        const double v = cluster.spread > 0.0
                             ? cluster.centroid[d] + rng.normal(0.0, cluster.spread)
                             : cluster.centroid[d];
        x[d] = std::clamp(v, 0.0, 1.0);
      }
      stream.features.push_back(std::move(x));
      stream.class_ids.push_back(cluster.class_id);
    }
  }
  return stream;
}

double nearest_centroid_accuracy(const SynthStream& stream,
                                 const std::vector<ClusterSpec>& clusters) {
  if (stream.features.empty()) throw std::invalid_argument("nearest_centroid: empty stream");
  size_t correct = 0;
  for (size_t i = 0; i < stream.features.size(); ++i) {
    double best = 0.0;
    int best_class = -1;
    for (const auto& cluster : clusters) {
      double d2 = 0.0;
      for (size_t k = 0; k < cluster.centroid.size(); ++k) {
        const double d = stream.features[i][k] - cluster.centroid[k];
        d2 += d * d;
      }
      if (best_class == -1 || d2 < best) {
        best = d2;
        best_class = cluster.class_id;
      }
    }
    if (best_class == stream.class_ids[i]) ++correct;
  }
  return static_cast<double>(correct) / static_cast<double>(stream.features.size());
}

}  // namespace dsnn
