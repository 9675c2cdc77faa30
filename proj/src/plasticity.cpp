#include "dsnn/plasticity.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace dsnn {

void PlasticityConfig::validate() const {
  if (a_plus <= 0.0) throw std::invalid_argument("plasticity: a_plus must be positive");
  if (a_minus >= 0.0) throw std::invalid_argument("plasticity: a_minus must be negative");
  if (tau_pre_ms <= 0.0 || tau_post_ms <= 0.0)
    throw std::invalid_argument("plasticity: trace time constants must be positive");
  if (w_min >= w_max) throw std::invalid_argument("plasticity: require w_min < w_max");
}

double firing_factor(double n, double alpha, double tau_ff) {
  if (alpha <= 0.0) throw std::invalid_argument("firing_factor: alpha must be positive");
  if (tau_ff <= 0.0) throw std::invalid_argument("firing_factor: tau_ff must be positive");
  if (n < 0.0) throw std::invalid_argument("firing_factor: selection count must be non-negative");
  return 1.0 - (1.0 / alpha) * (1.0 - std::exp(-(alpha * n) / tau_ff));
}

double ad_stdp_delta(double delta_t_ms, double f, const PlasticityConfig& cfg) {
  if (delta_t_ms >= 0.0) return cfg.a_plus * f * std::exp(-delta_t_ms / cfg.tau_pre_ms);
  return cfg.a_minus * f * std::exp(delta_t_ms / cfg.tau_post_ms);
}

double standard_stdp_delta(double delta_t_ms, const PlasticityConfig& cfg) {
  return ad_stdp_delta(delta_t_ms, 1.0, cfg);
}

FiringFactorState FiringFactorState::fresh(size_t neurons, double alpha, double tau) {
  if (alpha <= 0.0 || tau <= 0.0)
    throw std::invalid_argument("firing factor: alpha_base and tau_ff must be positive");
  FiringFactorState s;
  s.f.assign(neurons, 1.0);
  s.exposure.assign(neurons, 0.0);
  s.n.assign(neurons, 0);
  s.alpha_base = alpha;
  s.tau_ff = tau;
  return s;
}

void FiringFactorState::add_neuron() {
  f.push_back(1.0);
  exposure.push_back(0.0);
  n.push_back(0);
}

void FiringFactorState::remove_neurons(const std::vector<size_t>& sorted_indices) {
  for (auto it = sorted_indices.rbegin(); it != sorted_indices.rend(); ++it) {
    f.erase(f.begin() + static_cast<ptrdiff_t>(*it));
    exposure.erase(exposure.begin() + static_cast<ptrdiff_t>(*it));
    n.erase(n.begin() + static_cast<ptrdiff_t>(*it));
  }
}

void FiringFactorState::record_selection(size_t bmu, size_t sbmu, double asr_bmu,
                                         double asr_sbmu) {
  if (bmu == sbmu) throw std::invalid_argument("record_selection: bmu == sbmu");
  if (bmu >= size() || sbmu >= size())
    throw std::invalid_argument("record_selection: index out of range");
  if (asr_bmu <= 0.0)
    throw std::invalid_argument("record_selection: BMU rate must be positive (no selection)");
  if (asr_sbmu < 0.0 || asr_sbmu > asr_bmu)
    throw std::invalid_argument("record_selection: require 0 <= ASR_sbmu <= ASR_bmu");

  n[bmu] += 1;
  n[sbmu] += 1;
  exposure[bmu] += 1.0;
  exposure[sbmu] += asr_sbmu / asr_bmu;
  f[bmu] = firing_factor(exposure[bmu], alpha_base, tau_ff);
  f[sbmu] = firing_factor(exposure[sbmu], alpha_base, tau_ff);
}

TraceState TraceState::zeros(size_t inputs, size_t neurons) {
  TraceState t;
  t.pre.assign(inputs, 0.0);
  t.post.assign(neurons, 0.0);
  return t;
}

void TraceState::clear() {
  std::fill(pre.begin(), pre.end(), 0.0);
  std::fill(post.begin(), post.end(), 0.0);
}

void TraceState::remove_neurons(const std::vector<size_t>& sorted_indices) {
  for (auto it = sorted_indices.rbegin(); it != sorted_indices.rend(); ++it)
    post.erase(post.begin() + static_cast<ptrdiff_t>(*it));
}

void apply_trace_updates(SynapseMatrix& weights, std::span<const uint8_t> pre_spikes,
                         std::span<const uint8_t> post_spikes, TraceState& traces,
                         const FiringFactorState& ff, const PlasticityConfig& cfg,
                         PlasticityMode mode, FiringFactorSide side, double dt_ms) {
  const size_t inputs = weights.input_dim();
  const size_t neurons = weights.neurons();
  if (pre_spikes.size() != inputs || post_spikes.size() != neurons ||
      traces.pre.size() != inputs || traces.post.size() != neurons)
    throw std::invalid_argument("apply_trace_updates: shape mismatch");
  if (mode == PlasticityMode::adaptive && side == FiringFactorSide::excitatory &&
      ff.size() != neurons)
    throw std::invalid_argument("apply_trace_updates: firing factor state size mismatch");

  const double pre_decay = std::exp(-dt_ms / cfg.tau_pre_ms);
  const double post_decay = std::exp(-dt_ms / cfg.tau_post_ms);
  for (auto& x : traces.pre) x *= pre_decay;
  for (auto& x : traces.post) x *= post_decay;

  for (size_t i = 0; i < inputs; ++i)
    if (pre_spikes[i]) traces.pre[i] = 1.0;

  // f(j) == 1 in standard mode and in presynaptic gating (input channels
  // have no habituation state of their own)
  const bool gate = (mode == PlasticityMode::adaptive && side == FiringFactorSide::excitatory);

  for (size_t j = 0; j < neurons; ++j) {
    if (!post_spikes[j]) continue;
    const double scale = cfg.a_plus * (gate ? ff.f[j] : 1.0);
    if (scale == 0.0) continue;
    for (size_t i = 0; i < inputs; ++i) {
      if (traces.pre[i] == 0.0) continue;
      const double w = weights.get(i, j) + scale * traces.pre[i];
      weights.set(i, j, std::clamp(w, cfg.w_min, cfg.w_max));
    }
  }

  for (size_t i = 0; i < inputs; ++i) {
    if (!pre_spikes[i]) continue;
    double* row = weights.row(i);
    for (size_t j = 0; j < neurons; ++j) {
      if (traces.post[j] == 0.0) continue;
      const double scale = cfg.a_minus * (gate ? ff.f[j] : 1.0);
      row[j] = std::clamp(row[j] + scale * traces.post[j], cfg.w_min, cfg.w_max);
    }
  }

  for (size_t j = 0; j < neurons; ++j)
    if (post_spikes[j]) traces.post[j] = 1.0;
}

}  // namespace dsnn
