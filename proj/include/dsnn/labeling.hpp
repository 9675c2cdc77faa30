#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace dsnn {

// Semi-supervised neuron -> class assignment. labels[j] is the class whose
// labeled samples drive neuron j hardest (mean ASR), or -1 when the neuron
// stayed silent on the whole labeled subset.
struct LabelMap {
  std::vector<int> labels;                          // per neuron, -1 = unlabeled
  std::vector<std::vector<double>> class_mean_asr;  // [neuron][class], assignment-time table
  std::vector<uint8_t> class_covered;               // class had labeled samples
  size_t num_classes = 0;

  size_t neurons() const { return labels.size(); }
};

// asr_rows[k] is the layer's ASR response to labeled sample k of class
// sample_classes[k]. Ties between class means break to the lower class
// index. Classes without samples are flagged uncovered.
LabelMap assign_labels(const std::vector<std::vector<double>>& asr_rows,
                       const std::vector<int>& sample_classes, size_t num_classes);

// argmax over classes of the mean ASR of that class's labeled neurons;
// -1 ("unknown") when every labeled group is silent. Ties break low.
int predict_class(const LabelMap& map, std::span<const double> asr);

}  // namespace dsnn
