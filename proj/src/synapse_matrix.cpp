#include "dsnn/synapse_matrix.hpp"

#include <algorithm>
#include <stdexcept>

namespace dsnn {

SynapseMatrix::SynapseMatrix(size_t input_dim, size_t neurons, double initial)
    : input_dim_(input_dim), neurons_(neurons), w_(input_dim * neurons, initial) {}

SynapseMatrix SynapseMatrix::random_uniform(size_t input_dim, size_t neurons, double lo, double hi,
                                            Rng& rng) {
  SynapseMatrix m(input_dim, neurons);
  for (auto& w : m.w_) w = rng.uniform(lo, hi);
  return m;
}

std::vector<double> SynapseMatrix::incoming(size_t neuron) const {
  std::vector<double> col(input_dim_);
  for (size_t i = 0; i < input_dim_; ++i) col[i] = get(i, neuron);
  return col;
}

void SynapseMatrix::add_neuron(const std::vector<double>& incoming_weights) {
  if (incoming_weights.size() != input_dim_)
    throw std::invalid_argument("SynapseMatrix: incoming weight column has wrong length");
  std::vector<double> next(input_dim_ * (neurons_ + 1));
  for (size_t i = 0; i < input_dim_; ++i) {
    const double* src = row(i);
    double* dst = next.data() + i * (neurons_ + 1);
    std::copy(src, src + neurons_, dst);
    dst[neurons_] = incoming_weights[i];
  }
  w_ = std::move(next);
  ++neurons_;
}

void SynapseMatrix::remove_neurons(const std::vector<size_t>& sorted_indices) {
  if (sorted_indices.empty()) return;
  std::vector<uint8_t> drop(neurons_, 0);
  for (size_t idx : sorted_indices) {
    if (idx >= neurons_) throw std::invalid_argument("SynapseMatrix: remove index out of range");
    drop[idx] = 1;
  }
  const size_t kept = neurons_ - sorted_indices.size();
  std::vector<double> next(input_dim_ * kept);
  for (size_t i = 0; i < input_dim_; ++i) {
    const double* src = row(i);
    double* dst = next.data() + i * kept;
    size_t k = 0;
    for (size_t j = 0; j < neurons_; ++j)
      if (!drop[j]) dst[k++] = src[j];
  }
  w_ = std::move(next);
  neurons_ = kept;
}

void SynapseMatrix::clip(double lo, double hi) {
  for (auto& w : w_) w = std::clamp(w, lo, hi);
}

void SynapseMatrix::normalize_incoming(double target_sum) {
  for (size_t j = 0; j < neurons_; ++j) {
    double sum = 0.0;
    for (size_t i = 0; i < input_dim_; ++i) sum += get(i, j);
    if (sum <= 0.0) continue;
    const double scale = target_sum / sum;
    for (size_t i = 0; i < input_dim_; ++i) set(i, j, get(i, j) * scale);
  }
}

double SynapseMatrix::min_weight() const {
  return w_.empty() ? 0.0 : *std::min_element(w_.begin(), w_.end());
}

double SynapseMatrix::max_weight() const {
  return w_.empty() ? 0.0 : *std::max_element(w_.begin(), w_.end());
}

}  // namespace dsnn
