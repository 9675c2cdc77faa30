#pragma once

#include <cstddef>
#include <vector>

#include "dsnn/rng.hpp"
#include "dsnn/spike_train.hpp"
#include "json.hpp"

namespace dsnn {

// Normalized feature row; every element is expected to lie in [0, 1].
using FeatureVector = std::vector<double>;

// Per-column min/max fitted on training data, plus the indices retained by
// feature selection. Serialized as a JSON sidecar next to preprocessed data.
struct ScalingStats {
  std::vector<double> min;
  std::vector<double> max;
  std::vector<size_t> retained;

  size_t columns() const { return min.size(); }
  bool is_constant(size_t col) const { return max[col] == min[col]; }

  nlohmann::json to_json() const;
  static ScalingStats from_json(const nlohmann::json& j);
};

struct EncoderConfig {
  double max_rate_hz = 63.75;
  double dt_s = 0.001;
  int duration = 200;

  // per-step Bernoulli probability for a feature value of 1.0
  double peak_probability() const { return max_rate_hz * dt_s; }
  void validate() const;
};

// Column-wise min/max over the rows. Throws on empty input.
ScalingStats fit_scaling(const std::vector<std::vector<double>>& rows);

// (x - min) / (max - min) clamped to [0, 1]; constant columns map to 0.
FeatureVector normalize(const std::vector<double>& raw, const ScalingStats& stats);

// Rate coding: channel i fires each timestep independently with probability
// features[i] * max_rate * dt. One uniform draw is consumed per (timestep,
// channel) cell whatever the probability, so trains generated from the same
// seed are comparable spike-by-spike across feature values.
SpikeTrain encode_poisson(const FeatureVector& features, const EncoderConfig& cfg, Rng& rng);

}  // namespace dsnn
