#include "dsnn/encoding.hpp"

#include <algorithm>
#include <stdexcept>

namespace dsnn {

nlohmann::json ScalingStats::to_json() const {
  return {{"min", min}, {"max", max}, {"retained", retained}};
}

ScalingStats ScalingStats::from_json(const nlohmann::json& j) {
  ScalingStats s;
  s.min = j.at("min").get<std::vector<double>>();
  s.max = j.at("max").get<std::vector<double>>();
  s.retained = j.at("retained").get<std::vector<size_t>>();
  if (s.min.size() != s.max.size())
    throw std::invalid_argument("ScalingStats: min/max length mismatch");
  return s;
}

void EncoderConfig::validate() const {
  if (duration <= 0) throw std::invalid_argument("encoder: duration must be positive");
  if (max_rate_hz < 0.0) throw std::invalid_argument("encoder: max_rate must be non-negative");
  if (dt_s <= 0.0) throw std::invalid_argument("encoder: dt must be positive");
  if (peak_probability() > 1.0)
    throw std::invalid_argument("encoder: max_rate * dt exceeds 1 (invalid Bernoulli probability)");
}

ScalingStats fit_scaling(const std::vector<std::vector<double>>& rows) {
  if (rows.empty()) throw std::invalid_argument("fit_scaling: empty dataset");
  const size_t cols = rows.front().size();
  ScalingStats stats;
  stats.min.assign(cols, 0.0);
  stats.max.assign(cols, 0.0);
  for (size_t c = 0; c < cols; ++c) {
    stats.min[c] = stats.max[c] = rows.front()[c];
  }
  for (const auto& row : rows) {
    if (row.size() != cols) throw std::invalid_argument("fit_scaling: ragged rows");
    for (size_t c = 0; c < cols; ++c) {
      stats.min[c] = std::min(stats.min[c], row[c]);
      stats.max[c] = std::max(stats.max[c], row[c]);
    }
  }
  stats.retained.resize(cols);
  for (size_t c = 0; c < cols; ++c) stats.retained[c] = c;
  return stats;
}

FeatureVector normalize(const std::vector<double>& raw, const ScalingStats& stats) {
  if (raw.size() != stats.columns())
    throw std::invalid_argument("normalize: row dimensionality does not match stats");
  FeatureVector out(raw.size());
  for (size_t c = 0; c < raw.size(); ++c) {
    if (stats.is_constant(c)) {
      out[c] = 0.0;
      continue;
    }
    const double v = (raw[c] - stats.min[c]) / (stats.max[c] - stats.min[c]);
    out[c] = std::clamp(v, 0.0, 1.0);
  }
  return out;
}

SpikeTrain encode_poisson(const FeatureVector& features, const EncoderConfig& cfg, Rng& rng) {
  cfg.validate();
  const int channels = static_cast<int>(features.size());
  SpikeTrain train(cfg.duration, channels);
  const double peak = cfg.peak_probability();

  std::vector<double> p(features.size());
  for (size_t i = 0; i < features.size(); ++i)
    p[i] = std::clamp(features[i], 0.0, 1.0) * peak;

  for (int t = 0; t < cfg.duration; ++t) {
    uint8_t* row = train.row(t);
    for (int c = 0; c < channels; ++c) {
      // draw unconditionally: common random numbers across feature values
      const double u = rng.uniform();
      row[c] = (u < p[static_cast<size_t>(c)]) ? 1 : 0;
    }
  }
  return train;
}

}  // namespace dsnn
