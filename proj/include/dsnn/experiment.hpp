#pragma once

#include <string>
#include <vector>

#include "dsnn/checkpoint.hpp"
#include "dsnn/config.hpp"
#include "dsnn/hierarchy.hpp"
#include "dsnn/metrics.hpp"

namespace dsnn {

struct LabeledSet {
  std::vector<FeatureVector> features;
  std::vector<int> classes;
};

// Everything the lifelong protocol consumes, already normalized to [0,1].
// Phase-2 class ids are 0-based over the attack classes.
struct ProtocolData {
  size_t feature_dim = 0;
  size_t num_attack_classes = 0;
  std::vector<std::string> attack_class_names;
  std::vector<FeatureVector> phase1_train;  // benign + attacks, every task, shuffled
  LabeledSet phase1_labeled;                // classes in {0 = benign, 1 = attack}
  std::vector<std::vector<FeatureVector>> task_train;  // attack-only streams
  std::vector<LabeledSet> task_labeled;                // per task, phase-2 ids
  std::vector<LabeledSet> task_test;                   // per task, phase-2 ids
  std::vector<FeatureVector> benign_test;
  std::vector<std::vector<int>> task_class_ids;  // phase-2 ids introduced per task
};

ProtocolData build_synth_protocol(const ExperimentConfig& cfg);
ProtocolData load_cache_protocol(const ExperimentConfig& cfg);

struct ProtocolOutcome {
  PhaseOneModel phase1;
  PhaseTwoModel phase2;
  std::vector<size_t> neurons_after_task;
  std::vector<std::vector<double>> accuracy_rows;  // A[t][checkpoint offset]
  std::vector<std::vector<double>> recall_rows;    // macro recall analogue
  std::vector<double> forgetting;
  MetricsReport report;  // final cascade metrics on the test split
};

// Full protocol: train and freeze Phase 1, iterate the tasks through
// Phase 2, relabel and evaluate every seen task after each one, finish with
// a cascade evaluation. checkpoint_dir empty = no checkpoints written.
ProtocolOutcome run_protocol(const ExperimentConfig& cfg, const ProtocolData& data,
                             const std::string& checkpoint_dir = "");

// ---------------------------------------------------------------------------
// CLI command bodies (exceptions map to exit codes in the driver)
// ---------------------------------------------------------------------------

void run_preprocess(const ExperimentConfig& cfg);
void run_lifelong(const ExperimentConfig& cfg);
void run_eval(const ExperimentConfig& cfg, const std::string& checkpoint_path);

struct SynthVerifyResult {
  nlohmann::json report;
  bool pass = false;
};

// Synthetic two-task acceptance run: dynamic model vs static twin under the
// same seeds, plus fast self-checks of the core rules. Deterministic byte
// output for a fixed master seed.
SynthVerifyResult run_synth_verify(const ExperimentConfig& cfg);

// Writes report files (JSON + CSV tables) for one protocol outcome.
void write_outcome_files(const std::string& dir, const std::string& prefix,
                         const ProtocolOutcome& outcome);

}  // namespace dsnn
