#include "dsnn/labeling.hpp"

#include <stdexcept>

namespace dsnn {

LabelMap assign_labels(const std::vector<std::vector<double>>& asr_rows,
                       const std::vector<int>& sample_classes, size_t num_classes) {
  if (asr_rows.empty()) throw std::invalid_argument("assign_labels: labeled subset is empty");
  if (asr_rows.size() != sample_classes.size())
    throw std::invalid_argument("assign_labels: sample/class count mismatch");
  if (num_classes == 0) throw std::invalid_argument("assign_labels: no classes");

  const size_t neurons = asr_rows.front().size();
  std::vector<size_t> class_counts(num_classes, 0);
  std::vector<std::vector<double>> sums(neurons, std::vector<double>(num_classes, 0.0));

  for (size_t k = 0; k < asr_rows.size(); ++k) {
    const int c = sample_classes[k];
    if (c < 0 || static_cast<size_t>(c) >= num_classes)
      throw std::invalid_argument("assign_labels: class id out of range");
    if (asr_rows[k].size() != neurons)
      throw std::invalid_argument("assign_labels: ragged ASR rows");
    ++class_counts[static_cast<size_t>(c)];
    for (size_t j = 0; j < neurons; ++j) sums[j][static_cast<size_t>(c)] += asr_rows[k][j];
  }

  LabelMap map;
  map.num_classes = num_classes;
  map.labels.assign(neurons, -1);
  map.class_mean_asr.assign(neurons, std::vector<double>(num_classes, 0.0));
  map.class_covered.assign(num_classes, 0);

  for (size_t j = 0; j < neurons; ++j) {
    double best = 0.0;
    int best_class = -1;
    for (size_t c = 0; c < num_classes; ++c) {
      if (class_counts[c] == 0) continue;
      const double mean = sums[j][c] / static_cast<double>(class_counts[c]);
      map.class_mean_asr[j][c] = mean;
      if (mean > best) {  // strict: ties keep the earlier (lower) class
        best = mean;
        best_class = static_cast<int>(c);
      }
    }
    map.labels[j] = best_class;  // stays -1 if the neuron never responded
  }

  // covered = the class had samples AND at least one neuron took its label
  for (size_t j = 0; j < neurons; ++j)
    if (map.labels[j] >= 0) map.class_covered[static_cast<size_t>(map.labels[j])] = 1;
  return map;
}

int predict_class(const LabelMap& map, std::span<const double> asr) {
  if (map.neurons() == 0 || map.num_classes == 0)
    throw std::invalid_argument("predict_class: empty label map");
  if (asr.size() != map.neurons())
    throw std::invalid_argument("predict_class: ASR length does not match label map");

  std::vector<double> group_sum(map.num_classes, 0.0);
  std::vector<size_t> group_count(map.num_classes, 0);
  for (size_t j = 0; j < map.neurons(); ++j) {
    const int c = map.labels[j];
    if (c < 0) continue;
    group_sum[static_cast<size_t>(c)] += asr[j];
    ++group_count[static_cast<size_t>(c)];
  }

  double best = 0.0;
  int best_class = -1;
  for (size_t c = 0; c < map.num_classes; ++c) {
    if (group_count[c] == 0) continue;
    const double mean = group_sum[c] / static_cast<double>(group_count[c]);
    if (mean > best) {
      best = mean;
      best_class = static_cast<int>(c);
    }
  }
  return best_class;  // -1 when every labeled group is silent
}

}  // namespace dsnn
