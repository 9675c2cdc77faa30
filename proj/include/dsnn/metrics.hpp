#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "json.hpp"

namespace dsnn {

struct PrEntry {
  double precision = 0.0;
  double recall = 0.0;
  bool precision_defined = true;  // false when the class was never predicted
  bool recall_defined = true;     // false when the class has no support
};

// Standard per-class precision/recall from a square confusion matrix
// (rows = actual, columns = predicted). 0/0 cases report 0 with the
// corresponding defined flag cleared.
std::vector<PrEntry> precision_recall(const std::vector<std::vector<uint64_t>>& confusion);

// Cascade-weighted system accuracy: benign traffic is correct when Phase 1
// passes it, attack traffic only when Phase 1 detects it AND Phase 2 names
// the class. Proportions are normalized to sum to 1.
double overall_accuracy(double a1_benign, double a1_attack, double a2, double p_benign,
                        double p_attack);

// Average spikes per neuron per timestep.
double sparsity(size_t total_spikes, size_t neurons, size_t timesteps);

// accuracy_rows[t] holds task t's accuracy at checkpoints t..T-1 (after each
// later task finished). forgetting(t) = max earlier checkpoint minus the
// final one, clamped at 0.
std::vector<double> forgetting_scores(const std::vector<std::vector<double>>& accuracy_rows);

// Aggregated evaluation output; serialized to JSON and CSV tables.
struct MetricsReport {
  std::vector<std::string> class_names;  // phase-2 label space; last col of confusion = unknown
  std::vector<std::vector<uint64_t>> confusion;
  std::vector<PrEntry> per_class;
  double phase1_benign_accuracy = 0.0;
  double phase1_attack_accuracy = 0.0;
  double phase2_accuracy = 0.0;
  double overall = 0.0;
  double sparsity_phase1 = 0.0;
  double sparsity_phase2 = 0.0;
  size_t phase2_presentations = 0;
  std::vector<size_t> neuron_trajectory;          // per mini-batch
  std::vector<std::vector<double>> accuracy_rows; // A[t_eval][checkpoint offset]
  std::vector<double> forgetting;

  nlohmann::json to_json() const;
  std::string per_class_csv() const;
  std::string trajectory_csv() const;
  std::string accuracy_matrix_csv() const;
};

}  // namespace dsnn
