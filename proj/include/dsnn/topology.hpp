#pragma once

#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "dsnn/lif.hpp"
#include "dsnn/plasticity.hpp"
#include "dsnn/spike_train.hpp"
#include "dsnn/synapse_matrix.hpp"

namespace dsnn {

// Age and label tag of one excitatory neuron. The habituation state (f,
// exposure) lives in FiringFactorState at the same index.
struct NeuronMeta {
  uint64_t age = 0;  // mini-batches since creation
  int label = -1;    // class tag, -1 = unlabeled

  bool operator==(const NeuronMeta&) const = default;
};

struct GrowthConfig {
  double a_th = 0.02;        // activity threshold, spikes per timestep
  double f_th = 0.3;         // firing-factor threshold gating growth
  double p_th = 0.9;         // pruning threshold on the firing factor
  uint64_t age_max = 500;    // mini-batches
  size_t max_neurons = 200;  // hard cap
  size_t init_neurons = 10;
  double noise_sigma = 0.01;  // weight-copy jitter, fraction of weight range
  size_t batch_size = 32;
  bool growth_enabled = true;
  bool prune_enabled = true;

  void validate() const;
};

// The full mutable state of one excitatory layer. Everything indexed by
// neuron resizes together through grow/prune.
struct SpikingLayer {
  SynapseMatrix weights;
  LayerState state;
  TraceState traces;
  FiringFactorState ff;
  std::vector<NeuronMeta> meta;

  size_t neurons() const { return meta.size(); }
  size_t input_dim() const { return weights.input_dim(); }

  static SpikingLayer create(size_t input_dim, size_t neurons, const LifParams& lif,
                             double w_lo, double w_hi, double alpha_base, double tau_ff,
                             Rng& init_rng);
};

// Spike count over the trailing `window` timesteps of the raster, divided by
// the window length. window must be positive and no longer than the raster.
std::vector<double> compute_asr(const SpikeTrain& raster, int window);

// (bmu, sbmu) = indices of the highest and second-highest rate; ties break
// to the lowest index. Requires at least two entries.
std::pair<size_t, size_t> find_bmu_sbmu(std::span<const double> asr);

// Growth fires iff the BMU both responds weakly and has already habituated:
// asr < a_th AND f < f_th AND the layer is below the cap.
bool should_grow(double asr_bmu, double f_bmu, const GrowthConfig& cfg, size_t live_count);

// Append one neuron: incoming weights copied from the BMU plus Gaussian
// jitter of sigma = noise_sigma * (w_max - w_min), clipped to bounds; f = 1,
// age 0, zero exposure; membrane at rest with theta 0.
void grow_neuron(SpikingLayer& layer, size_t bmu, const GrowthConfig& cfg,
                 const PlasticityConfig& plast, const LifParams& lif, Rng& rng);

// Remove every neuron with age > age_max AND f > p_th, never dropping the
// live count below 2. When the floor binds, offenders are ranked by age
// (oldest first, then lowest index) and the oldest are retained. Returns the
// removed indices (pre-removal numbering, ascending); survivors keep their
// relative order and are otherwise untouched.
std::vector<size_t> prune(SpikingLayer& layer, const GrowthConfig& cfg);

// Batch-boundary aging: every live neuron's age advances by one.
void increment_ages(std::vector<NeuronMeta>& metas);

}  // namespace dsnn
