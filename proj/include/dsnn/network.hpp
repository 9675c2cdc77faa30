#pragma once

#include <cstddef>
#include <vector>

#include "dsnn/encoding.hpp"
#include "dsnn/lif.hpp"
#include "dsnn/plasticity.hpp"
#include "dsnn/spike_train.hpp"
#include "dsnn/topology.hpp"

namespace dsnn {

// Everything one module needs to run a presentation.
struct ModuleConfig {
  EncoderConfig encoder;
  LifParams lif;
  PlasticityConfig plasticity;
  PlasticityMode mode = PlasticityMode::standard;
  FiringFactorSide ff_side = FiringFactorSide::excitatory;
  bool weight_norm = false;
  double weight_norm_target = 0.25;  // mean incoming weight per input channel
  int asr_window = 200;              // clipped to the presentation length
  double w_init_lo = 0.3;
  double w_init_hi = 0.7;

  void validate() const;
};

struct PresentationResult {
  SpikeTrain raster;         // excitatory spikes, timestep x neuron
  std::vector<double> asr;   // spikes per timestep over the ASR window
  size_t total_spikes = 0;
};

// One stimulus presentation with plasticity on. Starts from an inter-sample
// reset (v at rest, refractory and traces cleared, theta persistent), then
// steps the layer once per input timestep with last step's lateral
// inhibition folded into the drive. Weights, traces and theta are updated
// in place.
PresentationResult present_learn(SpikingLayer& layer, const SpikeTrain& input,
                                 const ModuleConfig& cfg);

// Plasticity-off presentation on a scratch copy of the dynamic state; the
// layer itself is untouched, so concurrent read-only evaluation is safe.
PresentationResult present_infer(const SpikingLayer& layer, const SpikeTrain& input,
                                 const ModuleConfig& cfg);

}  // namespace dsnn
