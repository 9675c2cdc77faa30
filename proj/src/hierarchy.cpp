#include "dsnn/hierarchy.hpp"

#include <stdexcept>

namespace dsnn {

PhaseOneModel make_phase1(size_t input_dim, size_t neurons, const ModuleConfig& cfg,
                          uint64_t init_seed) {
  cfg.validate();
  Rng rng(init_seed);
  PhaseOneModel model{
      .layer = SpikingLayer::create(input_dim, neurons, cfg.lif, cfg.w_init_lo, cfg.w_init_hi,
                                    1.0, 10.0, rng),
      .cfg = cfg,
      .labels = {},
  };
  return model;
}

PhaseTwoModel make_phase2(size_t input_dim, const ModuleConfig& cfg, const GrowthConfig& growth,
                          uint64_t init_seed) {
  cfg.validate();
  growth.validate();
  Rng rng(init_seed);
  PhaseTwoModel model{
      .layer = SpikingLayer::create(input_dim, growth.init_neurons, cfg.lif, cfg.w_init_lo,
                                    cfg.w_init_hi, 1.0, 10.0, rng),
      .cfg = cfg,
      .growth = growth,
      .labels = {},
      .events = {},
      .trajectory = {growth.init_neurons},
      .batches_done = 0,
      .growth_events = 0,
  };
  return model;
}

void train_phase1(PhaseOneModel& model, const std::vector<FeatureVector>& stream, size_t epochs,
                  const SeedTree& seeds, const std::string& stream_tag) {
  if (stream.empty()) throw std::invalid_argument("train_phase1: empty stream");
  for (size_t e = 0; e < epochs; ++e) {
    for (size_t k = 0; k < stream.size(); ++k) {
      Rng rng(seeds.derive(stream_tag, e * stream.size() + k));
      const SpikeTrain input = encode_poisson(stream[k], model.cfg.encoder, rng);
      present_learn(model.layer, input, model.cfg);
    }
  }
}

std::vector<double> phase1_activity(const PhaseOneModel& model, const FeatureVector& sample,
                                    uint64_t encode_seed) {
  if (sample.size() != model.input_dim())
    throw std::invalid_argument("phase1_activity: sample dimension mismatch");
  Rng rng(encode_seed);
  const SpikeTrain input = encode_poisson(sample, model.cfg.encoder, rng);
  return present_infer(model.layer, input, model.cfg).asr;
}

FeatureVector build_phase2_input(const FeatureVector& features, const std::vector<double>& asr) {
  FeatureVector out;
  out.reserve(features.size() + asr.size());
  out.insert(out.end(), features.begin(), features.end());
  out.insert(out.end(), asr.begin(), asr.end());
  return out;
}

namespace {

// Per-sample structural step shared by every phase-2 training path.
void phase2_structural_step(PhaseTwoModel& model, const std::vector<double>& asr,
                            const SeedTree& seeds) {
  const auto [bmu, sbmu] = find_bmu_sbmu(asr);
  const double asr_bmu = asr[bmu];
  const double asr_sbmu = asr[sbmu];

  // being the argmax counts as a selection whatever the response quality;
  // ASR_BMU == 0 means nothing responded and no selection is recorded
  if (asr_bmu > 0.0) model.layer.ff.record_selection(bmu, sbmu, asr_bmu, asr_sbmu);

  if (model.growth.growth_enabled &&
      should_grow(asr_bmu, model.layer.ff.f[bmu], model.growth, model.neurons())) {
    Rng noise(seeds.derive("growth-noise", model.growth_events++));
    grow_neuron(model.layer, bmu, model.growth, model.cfg.plasticity, model.cfg.lif, noise);
    model.events.push_back({model.batches_done, "grow", model.neurons() - 1});
  }
}

void phase2_batch_boundary(PhaseTwoModel& model) {
  if (model.growth.prune_enabled) {
    const auto removed = prune(model.layer, model.growth);
    for (size_t idx : removed) model.events.push_back({model.batches_done, "prune", idx});
  }
  increment_ages(model.layer.meta);
  ++model.batches_done;
  model.trajectory.push_back(model.neurons());
}

}  // namespace

void train_phase2_task(PhaseTwoModel& model, const PhaseOneModel& phase1,
                       const std::vector<FeatureVector>& attack_samples, const SeedTree& seeds,
                       const std::string& stream_tag) {
  if (attack_samples.empty()) throw std::invalid_argument("train_phase2_task: empty task stream");

  size_t in_batch = 0;
  for (size_t k = 0; k < attack_samples.size(); ++k) {
    const uint64_t seed = seeds.derive(stream_tag, k);
    const auto asr1 = phase1_activity(phase1, attack_samples[k], seed);
    const FeatureVector input = build_phase2_input(attack_samples[k], asr1);
    if (input.size() != model.input_dim())
      throw std::invalid_argument("train_phase2_task: concatenated input dimension mismatch");

    Rng rng(seeds.derive(stream_tag + "/p2", k));
    const SpikeTrain train = encode_poisson(input, model.cfg.encoder, rng);
    const auto result = present_learn(model.layer, train, model.cfg);

    phase2_structural_step(model, result.asr, seeds);

    if (++in_batch == model.growth.batch_size) {
      phase2_batch_boundary(model);
      in_batch = 0;
    }
  }
  if (in_batch > 0) phase2_batch_boundary(model);  // close the partial batch
}

std::vector<double> phase2_activity(const PhaseTwoModel& model, const PhaseOneModel& phase1,
                                    const FeatureVector& sample, uint64_t encode_seed,
                                    size_t* spikes) {
  const auto asr1 = phase1_activity(phase1, sample, encode_seed);
  const FeatureVector input = build_phase2_input(sample, asr1);
  Rng rng(SeedTree(encode_seed).derive("p2-encode"));
  const SpikeTrain train = encode_poisson(input, model.cfg.encoder, rng);
  const auto result = present_infer(model.layer, train, model.cfg);
  if (spikes != nullptr) *spikes = result.total_spikes;
  return result.asr;
}

Prediction infer(const PhaseOneModel& phase1, const PhaseTwoModel& phase2,
                 const FeatureVector& sample, uint64_t encode_seed) {
  if (phase1.labels.neurons() != phase1.neurons())
    throw std::invalid_argument("infer: phase 1 is unlabeled");
  if (phase2.labels.neurons() != phase2.neurons())
    throw std::invalid_argument("infer: phase 2 is unlabeled");

  Rng rng(encode_seed);
  const SpikeTrain input = encode_poisson(sample, phase1.cfg.encoder, rng);
  const auto p1 = present_infer(phase1.layer, input, phase1.cfg);

  Prediction pred;
  pred.phase1_asr = p1.asr;
  pred.phase1_spikes = p1.total_spikes;

  // binary vote over {benign=0, attack=1}; unknown (-1) raises no alarm
  const int verdict = predict_class(phase1.labels, p1.asr);
  if (verdict != 1) {
    pred.verdict = Prediction::Verdict::benign;
    return pred;  // cascade short-circuit: phase 2 never simulated
  }

  pred.verdict = Prediction::Verdict::attack;
  pred.phase2_ran = true;

  const FeatureVector p2_input = build_phase2_input(sample, p1.asr);
  Rng rng2(SeedTree(encode_seed).derive("p2-encode"));
  const SpikeTrain train2 = encode_poisson(p2_input, phase2.cfg.encoder, rng2);
  const auto p2 = present_infer(phase2.layer, train2, phase2.cfg);
  pred.phase2_spikes = p2.total_spikes;
  pred.attack_class = predict_class(phase2.labels, p2.asr);  // -1 = "unknown"
  return pred;
}

}  // namespace dsnn
