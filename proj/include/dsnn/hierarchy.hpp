#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "dsnn/data.hpp"
#include "dsnn/labeling.hpp"
#include "dsnn/network.hpp"
#include "dsnn/rng.hpp"
#include "dsnn/topology.hpp"

namespace dsnn {

// Static detector: fixed-size excitatory layer over the raw features,
// trained with standard STDP. The label space is {benign=0, attack=1}.
struct PhaseOneModel {
  SpikingLayer layer;
  ModuleConfig cfg;
  LabelMap labels;

  size_t neurons() const { return layer.neurons(); }
  size_t input_dim() const { return layer.input_dim(); }
};

struct GrowthEvent {
  uint64_t batch = 0;
  std::string kind;  // "grow" | "prune"
  size_t neuron = 0;
};

// Dynamic classifier over [features ++ phase-1 ASR], trained with Ad-STDP
// plus growth and pruning. The label space is the attack classes.
struct PhaseTwoModel {
  SpikingLayer layer;
  ModuleConfig cfg;
  GrowthConfig growth;
  LabelMap labels;
  std::vector<GrowthEvent> events;
  std::vector<size_t> trajectory;  // live count per mini-batch boundary
  uint64_t batches_done = 0;
  uint64_t growth_events = 0;  // also seeds per-event jitter streams

  size_t neurons() const { return layer.neurons(); }
  size_t input_dim() const { return layer.input_dim(); }
};

struct Prediction {
  enum class Verdict { benign, attack };
  Verdict verdict = Verdict::benign;
  int attack_class = -1;  // phase-2 label space, -1 = unknown
  std::vector<double> phase1_asr;
  size_t phase1_spikes = 0;
  size_t phase2_spikes = 0;
  bool phase2_ran = false;
};

PhaseOneModel make_phase1(size_t input_dim, size_t neurons, const ModuleConfig& cfg,
                          uint64_t init_seed);
PhaseTwoModel make_phase2(size_t input_dim, const ModuleConfig& cfg, const GrowthConfig& growth,
                          uint64_t init_seed);

// Unsupervised pass(es) of standard STDP over the stream. Presentation k of
// epoch e encodes with seeds.derive(stream_tag, e * n + k).
void train_phase1(PhaseOneModel& model, const std::vector<FeatureVector>& stream, size_t epochs,
                  const SeedTree& seeds, const std::string& stream_tag);

// One plasticity-off presentation; returns the per-neuron ASR. The model is
// const — inference clones the dynamic state.
std::vector<double> phase1_activity(const PhaseOneModel& model, const FeatureVector& sample,
                                    uint64_t encode_seed);

// [features ++ asr], raw features first.
FeatureVector build_phase2_input(const FeatureVector& features, const std::vector<double>& asr);

// One task of the lifelong protocol: per sample, encode the concatenated
// input, present with Ad-STDP, select BMU/SBMU, check growth (pre-update
// firing factor), record the selection; per mini-batch, prune then age.
void train_phase2_task(PhaseTwoModel& model, const PhaseOneModel& phase1,
                       const std::vector<FeatureVector>& attack_samples, const SeedTree& seeds,
                       const std::string& stream_tag);

// Cascaded verdict: Phase-1 binary vote first; benign short-circuits with
// zero Phase-2 cost. Unknown Phase-1 votes count as benign (no alarm).
Prediction infer(const PhaseOneModel& phase1, const PhaseTwoModel& phase2,
                 const FeatureVector& sample, uint64_t encode_seed);

// Phase-2 ASR for one sample without plasticity (used by labeling and
// teacher-forced evaluation). Spike count returned for sparsity accounting.
std::vector<double> phase2_activity(const PhaseTwoModel& model, const PhaseOneModel& phase1,
                                    const FeatureVector& sample, uint64_t encode_seed,
                                    size_t* spikes = nullptr);

}  // namespace dsnn
