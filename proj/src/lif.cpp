#include "dsnn/lif.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace dsnn {

void LifParams::validate() const {
  if (tau_mem_ms <= 0.0) throw std::invalid_argument("lif: tau_mem must be positive");
  if (tau_theta_ms <= 0.0) throw std::invalid_argument("lif: tau_theta must be positive");
  if (dt_ms <= 0.0) throw std::invalid_argument("lif: dt must be positive");
  // rest and reset both have to sit below threshold; reset may land on
  // either side of rest (the default is a depolarized reset)
  if (!(v_rest < v_thresh_base && v_reset < v_thresh_base))
    throw std::invalid_argument("lif: v_rest and v_reset must lie below v_thresh_base");
  if (refractory_steps < 0) throw std::invalid_argument("lif: refractory must be non-negative");
  if (theta_plus < 0.0) throw std::invalid_argument("lif: theta_plus must be non-negative");
  if (inhibition_strength < 0.0)
    throw std::invalid_argument("lif: inhibition_strength must be non-negative");
}

LayerState LayerState::at_rest(size_t n, const LifParams& p) {
  LayerState s;
  s.v.assign(n, p.v_rest);
  s.theta.assign(n, 0.0);
  s.refrac.assign(n, 0);
  return s;
}

void LayerState::add_neuron(const LifParams& p) {
  v.push_back(p.v_rest);
  theta.push_back(0.0);
  refrac.push_back(0);
}

void LayerState::remove_neurons(const std::vector<size_t>& sorted_indices) {
  // iterate back-to-front so earlier indices stay valid
  for (auto it = sorted_indices.rbegin(); it != sorted_indices.rend(); ++it) {
    v.erase(v.begin() + static_cast<ptrdiff_t>(*it));
    theta.erase(theta.begin() + static_cast<ptrdiff_t>(*it));
    refrac.erase(refrac.begin() + static_cast<ptrdiff_t>(*it));
  }
}

std::vector<uint8_t> step_layer(LayerState& state, std::span<const double> input_current,
                                const LifParams& p) {
  const size_t n = state.size();
  if (input_current.size() != n)
    throw std::invalid_argument("step_layer: input length does not match neuron count");

  const double leak = p.dt_ms / p.tau_mem_ms;
  const double theta_decay = std::exp(-p.dt_ms / p.tau_theta_ms);

  std::vector<uint8_t> spikes(n, 0);
  for (size_t i = 0; i < n; ++i) {
    state.theta[i] *= theta_decay;
    if (state.refrac[i] > 0) {
      --state.refrac[i];
      continue;
    }
    state.v[i] += leak * (p.v_rest - state.v[i]) + input_current[i];
    if (state.v[i] >= p.v_thresh_base + state.theta[i]) {
      spikes[i] = 1;
      state.v[i] = p.v_reset;
      state.refrac[i] = p.refractory_steps;
      state.theta[i] += p.theta_plus;
    }
  }
  return spikes;
}

std::vector<double> lateral_inhibition(std::span<const uint8_t> spikes, const LifParams& p) {
  size_t spikers = 0;
  for (uint8_t s : spikes) spikers += s;

  std::vector<double> current(spikes.size(), 0.0);
  if (spikers == 0) return current;
  for (size_t i = 0; i < spikes.size(); ++i) {
    const size_t peers = spikers - (spikes[i] ? 1 : 0);
    current[i] = -p.inhibition_strength * static_cast<double>(peers);
  }
  return current;
}

void reset_between_samples(LayerState& state, const LifParams& p) {
  std::fill(state.v.begin(), state.v.end(), p.v_rest);
  std::fill(state.refrac.begin(), state.refrac.end(), 0);
}

}  // namespace dsnn
