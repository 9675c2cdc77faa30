#pragma once

#include <string>
#include <vector>

#include "dsnn/data.hpp"
#include "dsnn/network.hpp"
#include "dsnn/topology.hpp"
#include "json.hpp"

namespace dsnn {

// Synthetic protocol layout: benign cluster plus block-coded attack
// clusters (attack class c lights dims [hot_dims*(c-1), hot_dims*c)).
struct SynthConfig {
  size_t dims = 16;
  size_t attack_classes = 4;
  size_t hot_dims = 4;
  double benign_level = 0.08;
  double hot_level = 0.85;
  double spread = 0.03;
  size_t train_per_class = 120;
  size_t test_per_class = 30;
  std::vector<std::vector<int>> task_groups = {{1, 2}, {3, 4}};  // attack class ids

  void validate() const;
  std::vector<ClusterSpec> train_clusters() const;
  std::vector<ClusterSpec> test_clusters() const;
  size_t num_tasks() const { return task_groups.size(); }
};

struct DataConfig {
  std::string source = "synth";  // "synth" | "cache"
  std::vector<std::string> csv_paths;
  std::string cache_dir;
  bool has_header = true;
  std::string benign_category = "Normal";
  std::vector<std::string> feature_list;  // empty -> shipped default / variance fallback
  size_t feature_count = 42;              // fallback selector width
  std::vector<std::vector<std::string>> task_groups;
  std::vector<std::string> excluded;

  CsvSchema schema() const;  // UNSW-NB15 schema unless columns are overridden
  std::vector<ColumnSpec> schema_columns;  // empty -> UNSW default
  std::vector<std::string> class_registry() const;  // benign + grouped + excluded
  std::vector<std::string> effective_feature_list() const;
};

// Every tunable in one place; JSON round-trips reject unknown keys and
// materialize defaults, so the persisted snapshot alone reproduces a run.
struct ExperimentConfig {
  uint64_t master_seed = 42;
  int threads = 1;
  std::string output_dir = "out";

  EncoderConfig encoder;
  LifParams lif;
  PlasticityConfig plasticity;
  double alpha_base = 1.0;
  double tau_ff = 10.0;
  FiringFactorSide ff_side = FiringFactorSide::excitatory;
  bool weight_norm = false;
  double weight_norm_target = 10.0;
  double w_init_lo = 0.3;
  double w_init_hi = 0.7;

  GrowthConfig growth;
  int asr_window = 200;

  size_t phase1_neurons = 100;
  size_t phase1_epochs = 1;
  PlasticityMode phase2_mode = PlasticityMode::adaptive;
  double labeled_fraction = 0.1;

  DataConfig data;
  SynthConfig synth;
  nlohmann::json static_override = default_static_override();

  void validate() const;
  nlohmann::json to_json() const;
  static ExperimentConfig from_json(const nlohmann::json& j);
  static ExperimentConfig load_file(const std::string& path);

  // Module views used by the hierarchy.
  ModuleConfig phase1_module() const;
  ModuleConfig phase2_module() const;

  // This config with the static_override block deep-merged on top: the
  // baseline twin (fixed size, standard STDP) comes from configuration, not
  // from a separate code path.
  ExperimentConfig static_twin() const;

  // Desk-scale defaults for the synthetic protocol (what synth-verify runs
  // when no config file is given).
  static ExperimentConfig synth_defaults();

  static nlohmann::json default_static_override();
};

// UNSW-NB15 training/testing-set layout: 42 feature columns plus
// attack_cat and label. Shipped so a feature list need not be hand-written.
const std::vector<ColumnSpec>& unsw_nb15_columns();
const std::vector<std::string>& unsw_nb15_default_features();

}  // namespace dsnn
