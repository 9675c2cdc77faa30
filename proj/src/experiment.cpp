#include "dsnn/experiment.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>
#include <thread>

#include "dsnn/data.hpp"

namespace dsnn {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

// ---------------------------------------------------------------------------
// Small utilities
// ---------------------------------------------------------------------------

void seeded_shuffle(std::vector<size_t>& idx, uint64_t seed) {
  Rng rng(seed);
  for (size_t i = idx.size(); i > 1; --i) {
    const size_t j = static_cast<size_t>(rng.next_u64() % i);
    std::swap(idx[i - 1], idx[j]);
  }
}

// Static partition over [0, n); thread count 1 keeps everything serial.
void parallel_for(size_t n, int threads, const std::function<void(size_t)>& body) {
  if (threads <= 1 || n < 2) {
    for (size_t i = 0; i < n; ++i) body(i);
    return;
  }
  const size_t workers = std::min<size_t>(static_cast<size_t>(threads), n);
  std::vector<std::thread> pool;
  const size_t chunk = (n + workers - 1) / workers;
  for (size_t w = 0; w < workers; ++w) {
    const size_t lo = w * chunk;
    const size_t hi = std::min(n, lo + chunk);
    if (lo >= hi) break;
    pool.emplace_back([lo, hi, &body] {
      for (size_t i = lo; i < hi; ++i) body(i);
    });
  }
  for (auto& t : pool) t.join();
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << text;
}

// ---------------------------------------------------------------------------
// Labeling passes
// ---------------------------------------------------------------------------

void label_phase1(PhaseOneModel& model, const LabeledSet& labeled, const SeedTree& seeds) {
  std::vector<std::vector<double>> rows(labeled.features.size());
  for (size_t i = 0; i < labeled.features.size(); ++i)
    rows[i] = phase1_activity(model, labeled.features[i], seeds.derive("encode/p1label", i));
  model.labels = assign_labels(rows, labeled.classes, 2);
  for (size_t j = 0; j < model.layer.meta.size(); ++j)
    model.layer.meta[j].label = model.labels.labels[j];
}

// Relabels phase 2 from the labeled subsets of every task seen so far.
// Sample seeds are keyed by (task, index) so the encoding of one labeled
// sample is identical at every checkpoint.
void label_phase2(PhaseTwoModel& model, const PhaseOneModel& phase1, const ProtocolData& data,
                  size_t tasks_seen, const SeedTree& seeds) {
  std::vector<std::vector<double>> rows;
  std::vector<int> classes;
  for (size_t t = 0; t < tasks_seen; ++t) {
    const auto& subset = data.task_labeled[t];
    const std::string tag = "encode/p2label/t" + std::to_string(t);
    for (size_t i = 0; i < subset.features.size(); ++i) {
      rows.push_back(phase2_activity(model, phase1, subset.features[i], seeds.derive(tag, i)));
      classes.push_back(subset.classes[i]);
    }
  }
  model.labels = assign_labels(rows, classes, data.num_attack_classes);
  for (size_t j = 0; j < model.layer.meta.size(); ++j)
    model.layer.meta[j].label = model.labels.labels[j];
}

// ---------------------------------------------------------------------------
// Evaluation passes
// ---------------------------------------------------------------------------

struct TaskEval {
  double accuracy = 0.0;
  double macro_recall = 0.0;
};

// Teacher-forced phase-2 classification of one task's attack test set.
// Encode seeds depend only on (task, sample), never the checkpoint, so the
// accuracy matrix isolates model change from encoding noise.
TaskEval eval_task(const PhaseTwoModel& model, const PhaseOneModel& phase1,
                   const ProtocolData& data, size_t task, const SeedTree& seeds, int threads,
                   std::vector<std::vector<uint64_t>>* confusion_out = nullptr) {
  const auto& test = data.task_test[task];
  const std::string tag = "encode/eval/t" + std::to_string(task);

  std::vector<int> predicted(test.features.size(), -1);
  parallel_for(test.features.size(), threads, [&](size_t i) {
    const auto asr = phase2_activity(model, phase1, test.features[i], seeds.derive(tag, i));
    predicted[i] = predict_class(model.labels, asr);
  });

  const size_t classes = data.num_attack_classes;
  std::vector<std::vector<uint64_t>> confusion(classes + 1,
                                               std::vector<uint64_t>(classes + 1, 0));
  size_t correct = 0;
  for (size_t i = 0; i < test.features.size(); ++i) {
    const int actual = test.classes[i];
    const int pred = predicted[i] < 0 ? static_cast<int>(classes) : predicted[i];
    confusion[static_cast<size_t>(actual)][static_cast<size_t>(pred)] += 1;
    if (predicted[i] == actual) ++correct;
  }

  TaskEval out;
  out.accuracy = test.features.empty()
                     ? 0.0
                     : static_cast<double>(correct) / static_cast<double>(test.features.size());

  const auto pr = precision_recall(confusion);
  double recall_sum = 0.0;
  size_t recall_n = 0;
  for (int c : data.task_class_ids[task]) {
    recall_sum += pr[static_cast<size_t>(c)].recall;
    ++recall_n;
  }
  out.macro_recall = recall_n == 0 ? 0.0 : recall_sum / static_cast<double>(recall_n);
  if (confusion_out != nullptr) *confusion_out = std::move(confusion);
  return out;
}

struct CascadeEval {
  double phase1_benign_acc = 0.0;
  double phase1_attack_acc = 0.0;
  double sparsity_phase1 = 0.0;
  double sparsity_phase2 = 0.0;
  size_t phase2_presentations = 0;
  std::vector<std::vector<uint64_t>> confusion;  // (C+1)^2, last = unknown/missed
};

CascadeEval cascade_eval(const PhaseOneModel& phase1, const PhaseTwoModel& phase2,
                         const ProtocolData& data, const SeedTree& seeds, int threads) {
  const size_t classes = data.num_attack_classes;
  CascadeEval out;
  out.confusion.assign(classes + 1, std::vector<uint64_t>(classes + 1, 0));

  std::vector<Prediction> benign_preds(data.benign_test.size());
  parallel_for(data.benign_test.size(), threads, [&](size_t i) {
    benign_preds[i] =
        infer(phase1, phase2, data.benign_test[i], seeds.derive("encode/cascade/benign", i));
  });

  size_t benign_ok = 0;
  size_t p1_spikes = 0, p1_pres = 0, p2_spikes = 0, p2_pres = 0;
  for (const auto& pred : benign_preds) {
    if (pred.verdict == Prediction::Verdict::benign) ++benign_ok;
    p1_spikes += pred.phase1_spikes;
    ++p1_pres;
    if (pred.phase2_ran) {
      p2_spikes += pred.phase2_spikes;
      ++p2_pres;
    }
  }

  size_t attack_total = 0, attack_detected = 0;
  for (size_t t = 0; t < data.task_test.size(); ++t) {
    const auto& test = data.task_test[t];
    const std::string tag = "encode/cascade/t" + std::to_string(t);
    std::vector<Prediction> preds(test.features.size());
    parallel_for(test.features.size(), threads, [&](size_t i) {
      preds[i] = infer(phase1, phase2, test.features[i], seeds.derive(tag, i));
    });
    for (size_t i = 0; i < preds.size(); ++i) {
      const auto& pred = preds[i];
      ++attack_total;
      p1_spikes += pred.phase1_spikes;
      ++p1_pres;
      if (pred.phase2_ran) {
        p2_spikes += pred.phase2_spikes;
        ++p2_pres;
      }
      const size_t actual = static_cast<size_t>(test.classes[i]);
      if (pred.verdict == Prediction::Verdict::attack) {
        ++attack_detected;
        const size_t predicted =
            pred.attack_class < 0 ? classes : static_cast<size_t>(pred.attack_class);
        out.confusion[actual][predicted] += 1;
      } else {
        out.confusion[actual][classes] += 1;  // missed: lands in the unknown column
      }
    }
  }

  out.phase1_benign_acc = data.benign_test.empty()
                              ? 0.0
                              : static_cast<double>(benign_ok) /
                                    static_cast<double>(data.benign_test.size());
  out.phase1_attack_acc =
      attack_total == 0 ? 0.0
                        : static_cast<double>(attack_detected) / static_cast<double>(attack_total);

  const size_t steps = static_cast<size_t>(phase1.cfg.encoder.duration);
  if (p1_pres > 0)
    out.sparsity_phase1 = sparsity(p1_spikes, phase1.neurons() * p1_pres, steps);
  if (p2_pres > 0)
    out.sparsity_phase2 = sparsity(p2_spikes, phase2.neurons() * p2_pres, steps);
  out.phase2_presentations = p2_pres;
  return out;
}

}  // namespace

// ---------------------------------------------------------------------------
// Protocol data builders
// ---------------------------------------------------------------------------

ProtocolData build_synth_protocol(const ExperimentConfig& cfg) {
  const SeedTree seeds(cfg.master_seed);
  const SynthConfig& s = cfg.synth;
  s.validate();

  const auto train_stream = synth_generate(s.train_clusters(), seeds.derive("synth/train"));
  const auto test_stream = synth_generate(s.test_clusters(), seeds.derive("synth/test"));

  ProtocolData d;
  d.feature_dim = s.dims;
  d.num_attack_classes = s.attack_classes;
  for (size_t c = 1; c <= s.attack_classes; ++c)
    d.attack_class_names.push_back("attack_" + std::to_string(c));

  // phase-1 stream: everything, shuffled
  std::vector<size_t> order(train_stream.features.size());
  for (size_t i = 0; i < order.size(); ++i) order[i] = i;
  seeded_shuffle(order, seeds.derive("shuffle/p1"));
  for (size_t i : order) d.phase1_train.push_back(train_stream.features[i]);

  // per-class training indices
  std::vector<std::vector<size_t>> by_class(s.attack_classes + 1);
  for (size_t i = 0; i < train_stream.features.size(); ++i)
    by_class[static_cast<size_t>(train_stream.class_ids[i])].push_back(i);

  // labeled subset: seeded per-class choice of ceil(fraction * n)
  for (size_t c = 0; c <= s.attack_classes; ++c) {
    auto idx = by_class[c];
    seeded_shuffle(idx, seeds.derive("labeled", c));
    const size_t take = std::max<size_t>(
        1, static_cast<size_t>(std::ceil(cfg.labeled_fraction * static_cast<double>(idx.size()))));
    for (size_t k = 0; k < std::min(take, idx.size()); ++k) {
      d.phase1_labeled.features.push_back(train_stream.features[idx[k]]);
      d.phase1_labeled.classes.push_back(c == 0 ? 0 : 1);
    }
  }

  d.task_train.resize(s.num_tasks());
  d.task_labeled.resize(s.num_tasks());
  d.task_test.resize(s.num_tasks());
  d.task_class_ids.resize(s.num_tasks());

  for (size_t t = 0; t < s.num_tasks(); ++t) {
    std::vector<size_t> task_idx;
    for (int c : s.task_groups[t]) {
      d.task_class_ids[t].push_back(c - 1);  // phase-2 ids are 0-based
      for (size_t i : by_class[static_cast<size_t>(c)]) task_idx.push_back(i);
    }
    seeded_shuffle(task_idx, seeds.derive("shuffle/task", t));
    for (size_t i : task_idx) d.task_train[t].push_back(train_stream.features[i]);

    // labeled attacks for this task
    for (int c : s.task_groups[t]) {
      auto idx = by_class[static_cast<size_t>(c)];
      seeded_shuffle(idx, seeds.derive("labeled", static_cast<uint64_t>(c)));
      const size_t take = std::max<size_t>(
          1,
          static_cast<size_t>(std::ceil(cfg.labeled_fraction * static_cast<double>(idx.size()))));
      for (size_t k = 0; k < std::min(take, idx.size()); ++k) {
        d.task_labeled[t].features.push_back(train_stream.features[idx[k]]);
        d.task_labeled[t].classes.push_back(c - 1);
      }
    }

    for (size_t i = 0; i < test_stream.features.size(); ++i) {
      const int c = test_stream.class_ids[i];
      if (std::find(s.task_groups[t].begin(), s.task_groups[t].end(), c) !=
          s.task_groups[t].end()) {
        d.task_test[t].features.push_back(test_stream.features[i]);
        d.task_test[t].classes.push_back(c - 1);
      }
    }
  }

  for (size_t i = 0; i < test_stream.features.size(); ++i)
    if (test_stream.class_ids[i] == 0) d.benign_test.push_back(test_stream.features[i]);

  return d;
}

// ---------------------------------------------------------------------------
// Preprocess cache
// ---------------------------------------------------------------------------

namespace {

std::string matrix_csv(const std::vector<FeatureVector>& rows, const std::vector<int>& classes) {
  std::ostringstream os;
  os.precision(17);
  const size_t dim = rows.empty() ? 0 : rows.front().size();
  for (size_t c = 0; c < dim; ++c) os << 'f' << c << ',';
  os << "class_id\n";
  for (size_t r = 0; r < rows.size(); ++r) {
    for (double v : rows[r]) os << v << ',';
    os << classes[r] << '\n';
  }
  return os.str();
}

void read_matrix_csv(const fs::path& path, size_t dim, std::vector<FeatureVector>& rows,
                     std::vector<int>& classes) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cache: cannot open " + path.string());
  std::string line;
  if (!std::getline(in, line)) throw std::runtime_error("cache: empty file " + path.string());
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::stringstream ss(line);
    std::string cell;
    FeatureVector row;
    row.reserve(dim);
    while (std::getline(ss, cell, ',')) row.push_back(std::stod(cell));
    if (row.size() != dim + 1) throw std::runtime_error("cache: bad row in " + path.string());
    classes.push_back(static_cast<int>(row.back()));
    row.pop_back();
    rows.push_back(std::move(row));
  }
}

std::vector<std::string> choose_feature_list(const ExperimentConfig& cfg,
                                             const std::vector<FlowRecord>& train_records,
                                             const CsvSchema& schema) {
  if (!cfg.data.feature_list.empty()) return cfg.data.feature_list;
  if (cfg.data.schema_columns.empty()) return unsw_nb15_default_features();
  // custom schema without a list: variance-ranking fallback
  return select_features_by_variance(train_records, schema, cfg.data.feature_count);
}

}  // namespace

void run_preprocess(const ExperimentConfig& cfg) {
  if (cfg.data.csv_paths.empty())
    throw std::invalid_argument("preprocess: data.csv_paths is empty");
  if (cfg.data.cache_dir.empty())
    throw std::invalid_argument("preprocess: data.cache_dir is empty");
  if (cfg.data.task_groups.empty())
    throw std::invalid_argument("preprocess: data.task_groups is empty");

  const SeedTree seeds(cfg.master_seed);
  const CsvSchema schema = cfg.data.schema();
  auto loaded = load_csv(cfg.data.csv_paths, schema);
  for (const auto& w : loaded.report.warnings) std::cerr << "[warn] " << w << '\n';
  if (loaded.records.empty()) throw std::runtime_error("preprocess: no usable records");

  const auto registry = cfg.data.class_registry();
  auto class_of = [&](const FlowRecord& rec) -> int {
    const std::string& tag = rec.is_attack ? rec.category : schema.benign_category;
    auto it = std::find(registry.begin(), registry.end(), tag);
    return it == registry.end() ? -1 : static_cast<int>(it - registry.begin());
  };

  std::vector<FlowRecord> kept;
  std::vector<int> ids;
  size_t unknown_category = 0;
  for (auto& rec : loaded.records) {
    const int cid = class_of(rec);
    if (cid < 0) {
      ++unknown_category;
      continue;
    }
    kept.push_back(std::move(rec));
    ids.push_back(cid);
  }
  if (unknown_category > 0)
    std::cerr << "[warn] dropped " << unknown_category << " rows with unlisted categories\n";

  const auto split = split_8_1_1(ids, seeds.derive("split"));

  auto slice = [&](const std::vector<size_t>& idx) {
    std::vector<FlowRecord> out;
    out.reserve(idx.size());
    for (size_t i : idx) out.push_back(kept[i]);
    return out;
  };
  const auto train_records = slice(split.train);
  const auto val_records = slice(split.validation);
  const auto test_records = slice(split.test);

  const auto feature_list = choose_feature_list(cfg, train_records, schema);
  const auto pre_train = preprocess(train_records, feature_list, schema, registry);
  const FittedPreprocess fitted{pre_train.stats, pre_train.dicts};
  const auto pre_val = preprocess(val_records, feature_list, schema, registry, fitted);
  const auto pre_test = preprocess(test_records, feature_list, schema, registry, fitted);

  fs::create_directories(cfg.data.cache_dir);
  const fs::path dir(cfg.data.cache_dir);
  write_text(dir / "train.csv", matrix_csv(pre_train.features, pre_train.class_ids));
  write_text(dir / "validation.csv", matrix_csv(pre_val.features, pre_val.class_ids));
  write_text(dir / "test.csv", matrix_csv(pre_test.features, pre_test.class_ids));

  json manifest = {
      {"format_version", 1},
      {"feature_list", feature_list},
      {"class_names", registry},
      {"stats", pre_train.stats.to_json()},
      {"dicts", pre_train.dicts.to_json()},
      {"master_seed", cfg.master_seed},
      {"row_counts",
       {{"train", pre_train.features.size()},
        {"validation", pre_val.features.size()},
        {"test", pre_test.features.size()}}},
      {"skipped_rows", loaded.report.skipped},
      {"dropped_unlisted_category", unknown_category},
  };
  write_text(dir / "manifest.json", manifest.dump(2) + "\n");
  std::cout << "cache written to " << dir.string() << " (train " << pre_train.features.size()
            << ", validation " << pre_val.features.size() << ", test "
            << pre_test.features.size() << ")\n";
}

ProtocolData load_cache_protocol(const ExperimentConfig& cfg) {
  if (cfg.data.cache_dir.empty())
    throw std::invalid_argument("lifelong: data.cache_dir is empty");
  const fs::path dir(cfg.data.cache_dir);
  std::ifstream in(dir / "manifest.json");
  if (!in) throw std::runtime_error("cache: missing manifest in " + dir.string());
  json manifest;
  in >> manifest;
  if (manifest.at("format_version").get<int>() != 1)
    throw std::runtime_error("cache: unsupported manifest version");

  const auto class_names = manifest.at("class_names").get<std::vector<std::string>>();
  const auto feature_list = manifest.at("feature_list").get<std::vector<std::string>>();
  const size_t dim = feature_list.size();

  std::vector<FeatureVector> train_rows, test_rows;
  std::vector<int> train_ids, test_ids;
  read_matrix_csv(dir / "train.csv", dim, train_rows, train_ids);
  read_matrix_csv(dir / "test.csv", dim, test_rows, test_ids);

  // registry-name groups -> registry ids
  if (cfg.data.task_groups.empty())
    throw std::invalid_argument("lifelong: data.task_groups is empty");
  std::vector<std::vector<int>> groups;
  for (const auto& g : cfg.data.task_groups) {
    std::vector<int> ids;
    for (const auto& name : g) {
      auto it = std::find(class_names.begin(), class_names.end(), name);
      if (it == class_names.end())
        throw std::invalid_argument("lifelong: task class '" + name + "' not in cache registry");
      ids.push_back(static_cast<int>(it - class_names.begin()));
    }
    groups.push_back(std::move(ids));
  }

  const SeedTree seeds(cfg.master_seed);
  std::vector<size_t> train_pool(train_rows.size());
  for (size_t i = 0; i < train_pool.size(); ++i) train_pool[i] = i;
  const auto tasks = make_tasks(train_ids, train_pool, groups, seeds.derive("tasks"));

  ProtocolData d;
  d.feature_dim = dim;

  // phase-2 label space: the grouped classes, in group order
  std::vector<int> registry_to_p2(class_names.size(), -1);
  for (const auto& g : groups)
    for (int c : g) {
      registry_to_p2[static_cast<size_t>(c)] = static_cast<int>(d.num_attack_classes);
      d.attack_class_names.push_back(class_names[static_cast<size_t>(c)]);
      ++d.num_attack_classes;
    }

  // phase-1 stream: all benign + grouped attacks from the train split
  std::vector<size_t> p1_idx;
  for (size_t i = 0; i < train_rows.size(); ++i) {
    const int cid = train_ids[i];
    if (cid == 0 || registry_to_p2[static_cast<size_t>(cid)] >= 0) p1_idx.push_back(i);
  }
  seeded_shuffle(p1_idx, seeds.derive("shuffle/p1"));
  for (size_t i : p1_idx) d.phase1_train.push_back(train_rows[i]);

  // labeled subsets, per registry class
  std::vector<std::vector<size_t>> by_class(class_names.size());
  for (size_t i = 0; i < train_rows.size(); ++i)
    by_class[static_cast<size_t>(train_ids[i])].push_back(i);

  auto labeled_of_class = [&](size_t cid) {
    auto idx = by_class[cid];
    seeded_shuffle(idx, seeds.derive("labeled", cid));
    const size_t take = std::max<size_t>(
        1, static_cast<size_t>(std::ceil(cfg.labeled_fraction * static_cast<double>(idx.size()))));
    idx.resize(std::min(take, idx.size()));
    return idx;
  };

  for (size_t i : labeled_of_class(0)) {
    d.phase1_labeled.features.push_back(train_rows[i]);
    d.phase1_labeled.classes.push_back(0);
  }
  for (const auto& g : groups)
    for (int c : g)
      for (size_t i : labeled_of_class(static_cast<size_t>(c))) {
        d.phase1_labeled.features.push_back(train_rows[i]);
        d.phase1_labeled.classes.push_back(1);
      }

  d.task_train.resize(groups.size());
  d.task_labeled.resize(groups.size());
  d.task_test.resize(groups.size());
  d.task_class_ids.resize(groups.size());

  for (size_t t = 0; t < groups.size(); ++t) {
    auto attack_idx = tasks[t].attacks;
    seeded_shuffle(attack_idx, seeds.derive("shuffle/task", t));
    for (size_t i : attack_idx) d.task_train[t].push_back(train_rows[i]);

    for (int c : groups[t]) {
      d.task_class_ids[t].push_back(registry_to_p2[static_cast<size_t>(c)]);
      for (size_t i : labeled_of_class(static_cast<size_t>(c))) {
        d.task_labeled[t].features.push_back(train_rows[i]);
        d.task_labeled[t].classes.push_back(registry_to_p2[static_cast<size_t>(c)]);
      }
    }

    for (size_t i = 0; i < test_rows.size(); ++i) {
      const int cid = test_ids[i];
      if (std::find(groups[t].begin(), groups[t].end(), cid) != groups[t].end()) {
        d.task_test[t].features.push_back(test_rows[i]);
        d.task_test[t].classes.push_back(registry_to_p2[static_cast<size_t>(cid)]);
      }
    }
  }

  for (size_t i = 0; i < test_rows.size(); ++i)
    if (test_ids[i] == 0) d.benign_test.push_back(test_rows[i]);

  return d;
}

// ---------------------------------------------------------------------------
// The lifelong protocol
// ---------------------------------------------------------------------------

ProtocolOutcome run_protocol(const ExperimentConfig& cfg, const ProtocolData& data,
                             const std::string& checkpoint_dir) {
  cfg.validate();
  if (data.task_train.empty()) throw std::invalid_argument("protocol: no tasks");
  const SeedTree seeds(cfg.master_seed);

  PhaseOneModel phase1 = make_phase1(data.feature_dim, cfg.phase1_neurons, cfg.phase1_module(),
                                     seeds.derive("init/p1"));
  train_phase1(phase1, data.phase1_train, cfg.phase1_epochs, seeds, "encode/p1train");
  label_phase1(phase1, data.phase1_labeled, seeds);

  GrowthConfig growth = cfg.growth;
  PhaseTwoModel phase2 = make_phase2(data.feature_dim + phase1.neurons(), cfg.phase2_module(),
                                     growth, seeds.derive("init/p2"));
  phase2.layer.ff.alpha_base = cfg.alpha_base;
  phase2.layer.ff.tau_ff = cfg.tau_ff;

  const size_t tasks = data.task_train.size();
  ProtocolOutcome outcome;
  outcome.accuracy_rows.assign(tasks, {});
  outcome.recall_rows.assign(tasks, {});

  for (size_t t = 0; t < tasks; ++t) {
    train_phase2_task(phase2, phase1, data.task_train[t], seeds,
                      "encode/p2task" + std::to_string(t));
    outcome.neurons_after_task.push_back(phase2.neurons());

    label_phase2(phase2, phase1, data, t + 1, seeds);
    for (size_t k = 0; k <= t; ++k) {
      const auto eval = eval_task(phase2, phase1, data, k, seeds, cfg.threads);
      outcome.accuracy_rows[k].push_back(eval.accuracy);
      outcome.recall_rows[k].push_back(eval.macro_recall);
    }

    if (!checkpoint_dir.empty()) {
      fs::create_directories(checkpoint_dir);
      save_checkpoint((fs::path(checkpoint_dir) /
                       ("checkpoint_after_task_" + std::to_string(t) + ".json"))
                          .string(),
                      phase1, phase2);
    }
  }

  outcome.forgetting = forgetting_scores(outcome.accuracy_rows);

  // final cascade metrics
  const auto cascade = cascade_eval(phase1, phase2, data, seeds, cfg.threads);
  MetricsReport& report = outcome.report;
  report.class_names = data.attack_class_names;
  report.class_names.push_back("unknown");
  report.confusion = cascade.confusion;
  report.per_class = precision_recall(cascade.confusion);
  report.phase1_benign_accuracy = cascade.phase1_benign_acc;
  report.phase1_attack_accuracy = cascade.phase1_attack_acc;

  // teacher-forced phase-2 accuracy over every attack test sample
  double acc_sum = 0.0;
  size_t n_sum = 0;
  for (size_t t = 0; t < tasks; ++t) {
    const auto eval = eval_task(phase2, phase1, data, t, seeds, cfg.threads);
    acc_sum += eval.accuracy * static_cast<double>(data.task_test[t].features.size());
    n_sum += data.task_test[t].features.size();
  }
  report.phase2_accuracy = n_sum == 0 ? 0.0 : acc_sum / static_cast<double>(n_sum);

  const double n_benign = static_cast<double>(data.benign_test.size());
  const double n_attack = static_cast<double>(n_sum);
  if (n_benign + n_attack > 0.0)
    report.overall =
        overall_accuracy(report.phase1_benign_accuracy, report.phase1_attack_accuracy,
                         report.phase2_accuracy, n_benign, n_attack);
  report.sparsity_phase1 = cascade.sparsity_phase1;
  report.sparsity_phase2 = cascade.sparsity_phase2;
  report.phase2_presentations = cascade.phase2_presentations;
  report.neuron_trajectory = phase2.trajectory;
  report.accuracy_rows = outcome.accuracy_rows;
  report.forgetting = outcome.forgetting;

  outcome.phase1 = std::move(phase1);
  outcome.phase2 = std::move(phase2);
  return outcome;
}

// ---------------------------------------------------------------------------
// Command bodies
// ---------------------------------------------------------------------------

namespace {

std::string events_csv(const PhaseTwoModel& model) {
  std::ostringstream os;
  os << "batch,event,neuron_id\n";
  for (const auto& e : model.events) os << e.batch << ',' << e.kind << ',' << e.neuron << '\n';
  return os.str();
}

json outcome_summary(const ProtocolOutcome& outcome) {
  return {
      {"neurons_after_task", outcome.neurons_after_task},
      {"accuracy_matrix", outcome.accuracy_rows},
      {"recall_matrix", outcome.recall_rows},
      {"forgetting", outcome.forgetting},
      {"metrics", outcome.report.to_json()},
  };
}

}  // namespace

void write_outcome_files(const std::string& dir, const std::string& prefix,
                         const ProtocolOutcome& outcome) {
  fs::create_directories(dir);
  const fs::path p(dir);
  write_text(p / (prefix + "_report.json"), outcome_summary(outcome).dump(2) + "\n");
  write_text(p / (prefix + "_per_class_pr.csv"), outcome.report.per_class_csv());
  write_text(p / (prefix + "_neuron_trajectory.csv"), outcome.report.trajectory_csv());
  write_text(p / (prefix + "_accuracy_matrix.csv"), outcome.report.accuracy_matrix_csv());
  write_text(p / (prefix + "_events.csv"), events_csv(outcome.phase2));
}

void run_lifelong(const ExperimentConfig& cfg) {
  const ProtocolData data =
      cfg.data.source == "synth" ? build_synth_protocol(cfg) : load_cache_protocol(cfg);

  fs::create_directories(cfg.output_dir);
  write_text(fs::path(cfg.output_dir) / "config_resolved.json", cfg.to_json().dump(2) + "\n");

  ProtocolOutcome dynamic_outcome = run_protocol(cfg, data, cfg.output_dir);
  write_outcome_files(cfg.output_dir, "dynamic", dynamic_outcome);

  const ExperimentConfig twin_cfg = cfg.static_twin();
  ProtocolOutcome static_outcome = run_protocol(twin_cfg, data);
  write_outcome_files(cfg.output_dir, "static", static_outcome);

  // side-by-side comparison table
  std::ostringstream cmp;
  cmp << "task,dynamic_recall_final,static_recall_final,dynamic_forgetting,static_forgetting\n";
  for (size_t t = 0; t < dynamic_outcome.recall_rows.size(); ++t) {
    cmp << t << ',' << dynamic_outcome.recall_rows[t].back() << ','
        << static_outcome.recall_rows[t].back() << ',' << dynamic_outcome.forgetting[t] << ','
        << static_outcome.forgetting[t] << '\n';
  }
  write_text(fs::path(cfg.output_dir) / "comparison.csv", cmp.str());

  if (cfg.data.source == "cache") {
    const double p1 = (dynamic_outcome.report.phase1_benign_accuracy +
                       dynamic_outcome.report.phase1_attack_accuracy) /
                      2.0;
    std::cout << "[info] phase-1 detection accuracy " << p1
              << " (soft expectation >= 0.85; informational only)\n";
  }
  std::cout << "lifelong run complete; outputs in " << cfg.output_dir << "\n";
}

void run_eval(const ExperimentConfig& cfg, const std::string& checkpoint_path) {
  const ProtocolData data =
      cfg.data.source == "synth" ? build_synth_protocol(cfg) : load_cache_protocol(cfg);
  CheckpointPair pair = load_checkpoint(checkpoint_path);

  const SeedTree seeds(cfg.master_seed);
  const auto cascade = cascade_eval(pair.phase1, pair.phase2, data, seeds, cfg.threads);

  MetricsReport report;
  report.class_names = data.attack_class_names;
  report.class_names.push_back("unknown");
  report.confusion = cascade.confusion;
  report.per_class = precision_recall(cascade.confusion);
  report.phase1_benign_accuracy = cascade.phase1_benign_acc;
  report.phase1_attack_accuracy = cascade.phase1_attack_acc;

  double acc_sum = 0.0;
  size_t n_sum = 0;
  for (size_t t = 0; t < data.task_test.size(); ++t) {
    const auto eval = eval_task(pair.phase2, pair.phase1, data, t, seeds, cfg.threads);
    acc_sum += eval.accuracy * static_cast<double>(data.task_test[t].features.size());
    n_sum += data.task_test[t].features.size();
  }
  report.phase2_accuracy = n_sum == 0 ? 0.0 : acc_sum / static_cast<double>(n_sum);
  if (!data.benign_test.empty() || n_sum > 0)
    report.overall =
        overall_accuracy(report.phase1_benign_accuracy, report.phase1_attack_accuracy,
                         report.phase2_accuracy, static_cast<double>(data.benign_test.size()),
                         static_cast<double>(n_sum));
  report.sparsity_phase1 = cascade.sparsity_phase1;
  report.sparsity_phase2 = cascade.sparsity_phase2;
  report.phase2_presentations = cascade.phase2_presentations;
  report.neuron_trajectory = pair.phase2.trajectory;

  fs::create_directories(cfg.output_dir);
  write_text(fs::path(cfg.output_dir) / "eval_report.json", report.to_json().dump(2) + "\n");
  write_text(fs::path(cfg.output_dir) / "eval_per_class_pr.csv", report.per_class_csv());
  if (cfg.data.source == "cache") {
    const double p1 =
        (report.phase1_benign_accuracy + report.phase1_attack_accuracy) / 2.0;
    std::cout << "[info] phase-1 detection accuracy " << p1
              << " (soft expectation >= 0.85; informational only)\n";
  }
  std::cout << report.to_json().dump(2) << '\n';
}

// ---------------------------------------------------------------------------
// synth-verify
// ---------------------------------------------------------------------------

namespace {

json make_check(const std::string& name, bool pass, json details) {
  return {{"name", name}, {"pass", pass}, {"details", std::move(details)}};
}

// Fast self-checks of the core rules (spot values and randomized cases).
// The acceptance suite re-derives all of these with independent oracles;
// these exist so a synth-verify run is self-contained.
std::vector<json> rule_checks(const ExperimentConfig& cfg) {
  std::vector<json> checks;

  {
    PlasticityConfig pc;
    bool ok = true;
    ok &= std::abs(ad_stdp_delta(20.0, 1.0, pc) - pc.a_plus * std::exp(-1.0)) < 1e-12;
    ok &= std::abs(ad_stdp_delta(-20.0, 0.5, pc) - pc.a_minus * 0.5 * std::exp(-1.0)) < 1e-12;
    ok &= ad_stdp_delta(5.0, 0.0, pc) == 0.0;
    ok &= std::abs(firing_factor(10.0, 1.0, 10.0) - std::exp(-1.0)) < 1e-12;
    ok &= firing_factor(0.0, 3.0, 7.0) == 1.0;
    checks.push_back(make_check("formula_spot_values", ok, {}));
  }

  {
    Rng rng(cfg.master_seed ^ 0x5eedULL);
    bool ok = true;
    for (int k = 0; k < 2000; ++k) {
      const double asr = rng.uniform();
      const double f = rng.uniform();
      const size_t live = 2 + static_cast<size_t>(rng.next_u64() % 64);
      GrowthConfig g = cfg.growth;
      const bool expected = asr < g.a_th && f < g.f_th && live < g.max_neurons;
      ok &= should_grow(asr, f, g, live) == expected;
    }
    checks.push_back(make_check("growth_rule_randomized", ok, {{"cases", 2000}}));
  }

  {
    // encoding determinism
    EncoderConfig ec = cfg.encoder;
    FeatureVector x = {0.1, 0.7, 0.3, 1.0};
    Rng a(42), b(42);
    const bool ok = encode_poisson(x, ec, a) == encode_poisson(x, ec, b);
    checks.push_back(make_check("encoding_determinism", ok, {}));
  }

  return checks;
}

}  // namespace

SynthVerifyResult run_synth_verify(const ExperimentConfig& cfg) {
  cfg.validate();
  const ProtocolData data = build_synth_protocol(cfg);

  // separability certificate
  const SeedTree seeds(cfg.master_seed);
  const auto train_stream = synth_generate(cfg.synth.train_clusters(), seeds.derive("synth/train"));
  const auto test_stream = synth_generate(cfg.synth.test_clusters(), seeds.derive("synth/test"));
  const double sep_train = nearest_centroid_accuracy(train_stream, cfg.synth.train_clusters());
  const double sep_test = nearest_centroid_accuracy(test_stream, cfg.synth.test_clusters());

  ProtocolOutcome dynamic_outcome = run_protocol(cfg, data);
  const ExperimentConfig twin_cfg = cfg.static_twin();
  ProtocolOutcome static_outcome = run_protocol(twin_cfg, data);

  std::vector<json> checks = rule_checks(cfg);
  checks.push_back(make_check("separability_oracle", sep_train >= 0.99 && sep_test >= 0.99,
                              {{"train", sep_train}, {"test", sep_test}}));

  const auto& counts = dynamic_outcome.neurons_after_task;
  const bool grew_on_task2 = counts.size() >= 2 && counts[1] > counts[0];
  checks.push_back(make_check("growth_on_new_task", grew_on_task2,
                              {{"neurons_after_task", counts}}));

  bool under_cap = true;
  for (size_t n : dynamic_outcome.phase2.trajectory) under_cap &= n <= cfg.growth.max_neurons;
  checks.push_back(make_check("neuron_cap_respected", under_cap,
                              {{"cap", cfg.growth.max_neurons}}));

  // trajectory may only decrease at a prune event
  {
    std::vector<uint64_t> prune_batches;
    for (const auto& e : dynamic_outcome.phase2.events)
      if (e.kind == "prune") prune_batches.push_back(e.batch);
    bool ok = true;
    const auto& traj = dynamic_outcome.phase2.trajectory;
    for (size_t b = 1; b < traj.size(); ++b) {
      if (traj[b] < traj[b - 1] &&
          std::find(prune_batches.begin(), prune_batches.end(), b - 1) == prune_batches.end())
        ok = false;
    }
    checks.push_back(make_check("trajectory_monotone_between_prunes", ok, {}));
  }

  // the twin is a fixed-size baseline by definition
  {
    bool constant = true;
    for (size_t n : static_outcome.phase2.trajectory)
      constant &= n == static_outcome.phase2.trajectory.front();
    checks.push_back(make_check("static_twin_size_constant", constant,
                                {{"neurons", static_outcome.phase2.trajectory.front()}}));
  }

  const double dyn_recall = dynamic_outcome.recall_rows[0].back();
  const double sta_recall = static_outcome.recall_rows[0].back();
  checks.push_back(make_check("task1_recall_dynamic_vs_static", dyn_recall >= sta_recall,
                              {{"dynamic", dyn_recall}, {"static", sta_recall}}));

  double dyn_forget = 0.0, sta_forget = 0.0;
  for (double v : dynamic_outcome.forgetting) dyn_forget += v;
  for (double v : static_outcome.forgetting) sta_forget += v;
  dyn_forget /= static_cast<double>(dynamic_outcome.forgetting.size());
  sta_forget /= static_cast<double>(static_outcome.forgetting.size());
  checks.push_back(make_check("forgetting_dynamic_le_static", dyn_forget <= sta_forget,
                              {{"dynamic", dyn_forget}, {"static", sta_forget}}));

  const bool sparse_ok = dynamic_outcome.report.sparsity_phase1 < 0.01 &&
                         dynamic_outcome.report.sparsity_phase2 < 0.01;
  checks.push_back(make_check("inference_sparsity_below_0.01", sparse_ok,
                              {{"phase1", dynamic_outcome.report.sparsity_phase1},
                               {"phase2", dynamic_outcome.report.sparsity_phase2}}));

  bool pass = true;
  for (const auto& c : checks) pass &= c.at("pass").get<bool>();

  SynthVerifyResult result;
  result.pass = pass;
  result.report = {
      {"format_version", 1},
      {"master_seed", cfg.master_seed},
      {"config", cfg.to_json()},
      {"checks", checks},
      {"protocol",
       {{"dynamic", outcome_summary(dynamic_outcome)},
        {"static", outcome_summary(static_outcome)},
        {"comparison",
         {{"task1_recall_dynamic", dyn_recall},
          {"task1_recall_static", sta_recall},
          {"forgetting_mean_dynamic", dyn_forget},
          {"forgetting_mean_static", sta_forget}}}}},
      {"pass", pass},
  };
  return result;
}

}  // namespace dsnn
