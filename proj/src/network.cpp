#include "dsnn/network.hpp"

#include <algorithm>
#include <stdexcept>

namespace dsnn {

void ModuleConfig::validate() const {
  encoder.validate();
  lif.validate();
  plasticity.validate();
  if (asr_window <= 0) throw std::invalid_argument("module: asr_window must be positive");
  if (weight_norm && weight_norm_target <= 0.0)
    throw std::invalid_argument("module: weight_norm_target must be positive");
  if (!(w_init_lo >= plasticity.w_min && w_init_hi <= plasticity.w_max && w_init_lo <= w_init_hi))
    throw std::invalid_argument("module: weight init range must sit inside [w_min, w_max]");
}

namespace {

PresentationResult run_presentation(const SynapseMatrix& weights, LayerState& state,
                                    TraceState* traces, SynapseMatrix* learned,
                                    const FiringFactorState& ff, const SpikeTrain& input,
                                    const ModuleConfig& cfg) {
  const size_t inputs = weights.input_dim();
  const size_t neurons = weights.neurons();
  if (static_cast<size_t>(input.channels()) != inputs)
    throw std::invalid_argument("present: input channel count does not match layer input dim");

  const int duration = input.duration();
  SpikeTrain raster(duration, static_cast<int>(neurons));
  std::vector<double> current(neurons, 0.0);
  std::vector<double> inhibition(neurons, 0.0);
  size_t total = 0;

  for (int t = 0; t < duration; ++t) {
    const uint8_t* pre = input.row(t);
    std::copy(inhibition.begin(), inhibition.end(), current.begin());
    for (size_t i = 0; i < inputs; ++i) {
      if (!pre[i]) continue;
      const double* row = weights.row(i);
      for (size_t j = 0; j < neurons; ++j) current[j] += row[j];
    }

    std::vector<uint8_t> spikes = step_layer(state, current, cfg.lif);

    if (learned != nullptr) {
      apply_trace_updates(*learned, {pre, inputs}, spikes, *traces, ff, cfg.plasticity,
                          cfg.mode, cfg.ff_side, cfg.lif.dt_ms);
    }

    inhibition = lateral_inhibition(spikes, cfg.lif);
    uint8_t* out = raster.row(t);
    for (size_t j = 0; j < neurons; ++j) {
      out[j] = spikes[j];
      total += spikes[j];
    }
  }

  const int window = std::min(cfg.asr_window, duration);
  PresentationResult result{.raster = std::move(raster), .asr = {}, .total_spikes = total};
  result.asr = compute_asr(result.raster, window);
  return result;
}

}  // namespace

PresentationResult present_learn(SpikingLayer& layer, const SpikeTrain& input,
                                 const ModuleConfig& cfg) {
  reset_between_samples(layer.state, cfg.lif);
  layer.traces.clear();
  auto result = run_presentation(layer.weights, layer.state, &layer.traces, &layer.weights,
                                 layer.ff, input, cfg);
  if (cfg.weight_norm)
    layer.weights.normalize_incoming(cfg.weight_norm_target *
                                     static_cast<double>(layer.input_dim()));
  return result;
}

PresentationResult present_infer(const SpikingLayer& layer, const SpikeTrain& input,
                                 const ModuleConfig& cfg) {
  LayerState scratch = layer.state;  // theta carries over; v/refrac reset below
  reset_between_samples(scratch, cfg.lif);
  return run_presentation(layer.weights, scratch, nullptr, nullptr, layer.ff, input, cfg);
}

}  // namespace dsnn
