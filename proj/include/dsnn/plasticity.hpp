#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "dsnn/synapse_matrix.hpp"

namespace dsnn {

struct PlasticityConfig {
  double a_plus = 0.01;    // LTP amplitude, > 0
  double a_minus = -0.012; // LTD amplitude, < 0
  double tau_pre_ms = 20.0;
  double tau_post_ms = 20.0;
  double w_min = 0.0;
  double w_max = 1.0;

  void validate() const;
};

enum class PlasticityMode { standard, adaptive };

// Which neuron's firing factor gates an update. Input channels carry no
// factor state (they are never BMUs), so `presynaptic` degenerates to an
// ungated update on input->excitatory synapses; `excitatory` attaches the
// factor of the excitatory neuron that owns the synapse.
enum class FiringFactorSide { excitatory, presynaptic };

// Closed-form habituation curve: 1 - (1/alpha) * (1 - exp(-alpha*n/tau_ff)).
// n = 0 gives 1; the large-n asymptote is 1 - 1/alpha.
double firing_factor(double n, double alpha, double tau_ff);

// Timing-dependent weight change gated by a firing factor f:
//   dt > 0 (LTP):  A_plus  * f * exp(-dt/tau_pre)
//   dt < 0 (LTD):  A_minus * f * exp(+dt/tau_post)
// Coincident spikes (dt == 0) take the LTP branch at full amplitude
// (the dt -> 0+ limit).
double ad_stdp_delta(double delta_t_ms, double f, const PlasticityConfig& cfg);

// ad_stdp_delta with f fixed at 1.
double standard_stdp_delta(double delta_t_ms, const PlasticityConfig& cfg);

// Per-neuron habituation bookkeeping. Mixed BMU/SBMU histories are folded
// into an accumulated exposure E: a BMU selection adds 1, an SBMU selection
// adds ASR_sbmu/ASR_bmu, and f is evaluated as firing_factor(E, alpha_base,
// tau_ff). Pure-BMU histories reduce to E = n, the textbook curve.
struct FiringFactorState {
  std::vector<double> f;         // current factor per neuron, starts at 1
  std::vector<double> exposure;  // accumulated effective selections E
  std::vector<uint64_t> n;       // raw BMU/SBMU selection count
  double alpha_base = 1.0;
  double tau_ff = 10.0;

  size_t size() const { return f.size(); }

  static FiringFactorState fresh(size_t neurons, double alpha_base, double tau_ff);
  void add_neuron();
  void remove_neurons(const std::vector<size_t>& sorted_indices);

  // One selection event: both counters increment, the BMU gains exposure 1,
  // the SBMU gains exposure scaled by its ASR relative to the BMU.
  void record_selection(size_t bmu, size_t sbmu, double asr_bmu, double asr_sbmu);
};

// Exponentially decaying pre/post traces for online STDP.
struct TraceState {
  std::vector<double> pre;   // per input channel
  std::vector<double> post;  // per excitatory neuron

  static TraceState zeros(size_t inputs, size_t neurons);
  void clear();
  void add_neuron() { post.push_back(0.0); }
  void remove_neurons(const std::vector<size_t>& sorted_indices);
};

// One timestep of online trace STDP:
//   1. decay both traces
//   2. bump pre traces of this step's input spikes to 1
//   3. LTP: each post spike of neuron j adds  a_plus * f(j) * pre_trace_i
//   4. LTD: each pre spike of channel i adds  a_minus * f(j) * post_trace_j
//   5. bump post traces of this step's spikes to 1
//   6. clip to [w_min, w_max]
// With this ordering a lone pre/post pair at offset k steps reproduces the
// pairwise formula exactly, and a coincident pair lands on the LTP branch.
void apply_trace_updates(SynapseMatrix& weights, std::span<const uint8_t> pre_spikes,
                         std::span<const uint8_t> post_spikes, TraceState& traces,
                         const FiringFactorState& ff, const PlasticityConfig& cfg,
                         PlasticityMode mode, FiringFactorSide side, double dt_ms);

}  // namespace dsnn
