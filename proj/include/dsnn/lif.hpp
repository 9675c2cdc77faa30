#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace dsnn {

// Leaky integrate-and-fire constants. Voltages in mV, time constants in ms.
struct LifParams {
  double v_rest = -65.0;
  double v_reset = -60.0;
  double v_thresh_base = -52.0;
  double tau_mem_ms = 100.0;
  double dt_ms = 1.0;
  int refractory_steps = 5;
  double theta_plus = 0.05;     // homeostatic threshold bump per own spike
  double tau_theta_ms = 1.0e4;  // homeostatic decay
  double inhibition_strength = 10.0;

  void validate() const;
};

// Mutable per-neuron state of one excitatory layer. Vectors resize together
// when the topology grows or shrinks.
struct LayerState {
  std::vector<double> v;      // membrane potential
  std::vector<double> theta;  // adaptive threshold offset, >= 0
  std::vector<int> refrac;    // remaining refractory steps

  size_t size() const { return v.size(); }

  static LayerState at_rest(size_t n, const LifParams& p);
  void add_neuron(const LifParams& p);
  void remove_neurons(const std::vector<size_t>& sorted_indices);
};

// One discrete step. Non-refractory neurons integrate
//   v <- v + (dt/tau_mem) * (v_rest - v) + input
// and spike at v >= v_thresh_base + theta (reset to v_reset, enter the
// refractory period, theta += theta_plus). Refractory neurons ignore input
// and hold v_reset. theta decays by exp(-dt/tau_theta) every step, before
// the spike bump.
std::vector<uint8_t> step_layer(LayerState& state, std::span<const double> input_current,
                                const LifParams& p);

// Inhibitory drive for the next step: each neuron receives
// -inhibition_strength per spiking peer; no self-inhibition.
std::vector<double> lateral_inhibition(std::span<const uint8_t> spikes, const LifParams& p);

// Inter-sample reset: v to rest, refractory cleared. theta persists (the
// homeostat is learned state). Synaptic traces are owned by the plasticity
// module and cleared by the caller.
void reset_between_samples(LayerState& state, const LifParams& p);

}  // namespace dsnn
