#include "dsnn/metrics.hpp"

#include <algorithm>
#include <sstream>
#include <stdexcept>

namespace dsnn {

std::vector<PrEntry> precision_recall(const std::vector<std::vector<uint64_t>>& confusion) {
  const size_t n = confusion.size();
  for (const auto& row : confusion)
    if (row.size() != n) throw std::invalid_argument("precision_recall: matrix must be square");

  std::vector<PrEntry> out(n);
  for (size_t c = 0; c < n; ++c) {
    uint64_t row_sum = 0, col_sum = 0;
    for (size_t k = 0; k < n; ++k) {
      row_sum += confusion[c][k];
      col_sum += confusion[k][c];
    }
    const uint64_t tp = confusion[c][c];
    if (col_sum == 0) {
      out[c].precision = 0.0;
      out[c].precision_defined = false;
    } else {
      out[c].precision = static_cast<double>(tp) / static_cast<double>(col_sum);
    }
    if (row_sum == 0) {
      out[c].recall = 0.0;
      out[c].recall_defined = false;
    } else {
      out[c].recall = static_cast<double>(tp) / static_cast<double>(row_sum);
    }
  }
  return out;
}

double overall_accuracy(double a1_benign, double a1_attack, double a2, double p_benign,
                        double p_attack) {
  if (p_benign < 0.0 || p_attack < 0.0)
    throw std::invalid_argument("overall_accuracy: proportions must be non-negative");
  const double total = p_benign + p_attack;
  if (total <= 0.0) throw std::invalid_argument("overall_accuracy: both proportions are zero");
  const double pb = p_benign / total;
  const double pa = p_attack / total;
  return pb * a1_benign + pa * a1_attack * a2;
}

double sparsity(size_t total_spikes, size_t neurons, size_t timesteps) {
  if (neurons == 0 || timesteps == 0)
    throw std::invalid_argument("sparsity: zero neurons or timesteps");
  return static_cast<double>(total_spikes) /
         (static_cast<double>(neurons) * static_cast<double>(timesteps));
}

std::vector<double> forgetting_scores(const std::vector<std::vector<double>>& accuracy_rows) {
  std::vector<double> out(accuracy_rows.size(), 0.0);
  for (size_t t = 0; t < accuracy_rows.size(); ++t) {
    const auto& row = accuracy_rows[t];
    if (row.empty()) throw std::invalid_argument("forgetting_scores: missing accuracy entries");
    const double final_acc = row.back();
    double best_earlier = final_acc;
    for (size_t k = 0; k + 1 < row.size(); ++k) best_earlier = std::max(best_earlier, row[k]);
    out[t] = std::max(0.0, best_earlier - final_acc);
  }
  return out;
}

nlohmann::json MetricsReport::to_json() const {
  nlohmann::json per_class_json = nlohmann::json::array();
  for (size_t c = 0; c < per_class.size(); ++c) {
    per_class_json.push_back({
        {"class", c < class_names.size() ? class_names[c] : "unknown"},
        {"precision", per_class[c].precision},
        {"precision_defined", per_class[c].precision_defined},
        {"recall", per_class[c].recall},
        {"recall_defined", per_class[c].recall_defined},
    });
  }
  return {
      {"class_names", class_names},
      {"confusion", confusion},
      {"per_class", per_class_json},
      {"phase1_benign_accuracy", phase1_benign_accuracy},
      {"phase1_attack_accuracy", phase1_attack_accuracy},
      {"phase2_accuracy", phase2_accuracy},
      {"overall_accuracy", overall},
      {"sparsity_phase1", sparsity_phase1},
      {"sparsity_phase2", sparsity_phase2},
      {"phase2_presentations", phase2_presentations},
      {"neuron_trajectory", neuron_trajectory},
      {"accuracy_matrix", accuracy_rows},
      {"forgetting", forgetting},
  };
}

std::string MetricsReport::per_class_csv() const {
  std::ostringstream os;
  os << "class,precision,precision_defined,recall,recall_defined\n";
  for (size_t c = 0; c < per_class.size(); ++c) {
    os << (c < class_names.size() ? class_names[c] : "unknown") << ','
       << per_class[c].precision << ',' << (per_class[c].precision_defined ? 1 : 0) << ','
       << per_class[c].recall << ',' << (per_class[c].recall_defined ? 1 : 0) << '\n';
  }
  return os.str();
}

std::string MetricsReport::trajectory_csv() const {
  std::ostringstream os;
  os << "batch,neurons\n";
  for (size_t b = 0; b < neuron_trajectory.size(); ++b)
    os << b << ',' << neuron_trajectory[b] << '\n';
  return os.str();
}

std::string MetricsReport::accuracy_matrix_csv() const {
  std::ostringstream os;
  os << "eval_task,after_task,accuracy\n";
  for (size_t t = 0; t < accuracy_rows.size(); ++t)
    for (size_t k = 0; k < accuracy_rows[t].size(); ++k)
      os << t << ',' << (t + k) << ',' << accuracy_rows[t][k] << '\n';
  return os.str();
}

}  // namespace dsnn
