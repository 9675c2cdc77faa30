#pragma once

#include <cstddef>
#include <vector>

#include "dsnn/rng.hpp"

namespace dsnn {

// Dense input -> excitatory weights, stored input-major so that the hot
// paths (per-input-spike current accumulation and depression) walk
// contiguous memory. The neuron dimension grows and shrinks with the
// topology; the input dimension is fixed at construction.
class SynapseMatrix {
 public:
  SynapseMatrix() : SynapseMatrix(0, 0) {}
  SynapseMatrix(size_t input_dim, size_t neurons, double initial = 0.0);

  static SynapseMatrix random_uniform(size_t input_dim, size_t neurons, double lo, double hi,
                                      Rng& rng);

  size_t input_dim() const { return input_dim_; }
  size_t neurons() const { return neurons_; }

  double get(size_t input, size_t neuron) const { return w_[input * neurons_ + neuron]; }
  void set(size_t input, size_t neuron, double value) { w_[input * neurons_ + neuron] = value; }

  // contiguous weights of one input channel across all neurons
  const double* row(size_t input) const { return w_.data() + input * neurons_; }
  double* row(size_t input) { return w_.data() + input * neurons_; }

  std::vector<double> incoming(size_t neuron) const;

  // append one neuron with the given incoming weight column
  void add_neuron(const std::vector<double>& incoming_weights);
  void remove_neurons(const std::vector<size_t>& sorted_indices);

  void clip(double lo, double hi);

  // rescale each neuron's incoming weight sum to target (columns with zero
  // mass are left untouched)
  void normalize_incoming(double target_sum);

  double min_weight() const;
  double max_weight() const;

  bool operator==(const SynapseMatrix& other) const = default;

 private:
  size_t input_dim_;
  size_t neurons_;
  std::vector<double> w_;  // input-major: w_[input * neurons_ + neuron]
};

}  // namespace dsnn
