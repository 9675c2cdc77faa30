#include "dsnn/topology.hpp"

#include <algorithm>
#include <stdexcept>

namespace dsnn {

void GrowthConfig::validate() const {
  if (!(f_th > 0.0 && f_th < 1.0)) throw std::invalid_argument("growth: f_th must be in (0,1)");
  if (!(p_th > 0.0 && p_th < 1.0)) throw std::invalid_argument("growth: p_th must be in (0,1)");
  if (!(p_th > f_th))
    throw std::invalid_argument(
        "growth: p_th must exceed f_th (prunable neurons are unspecialized, growth-blocking "
        "BMUs are specialized)");
  if (a_th < 0.0) throw std::invalid_argument("growth: a_th must be non-negative");
  if (age_max < 1) throw std::invalid_argument("growth: age_max must be at least 1");
  if (init_neurons < 2) throw std::invalid_argument("growth: init_neurons must be at least 2");
  if (max_neurons < init_neurons)
    throw std::invalid_argument("growth: max_neurons must be at least init_neurons");
  if (noise_sigma < 0.0) throw std::invalid_argument("growth: noise_sigma must be non-negative");
  if (batch_size < 1) throw std::invalid_argument("growth: batch_size must be at least 1");
}

SpikingLayer SpikingLayer::create(size_t input_dim, size_t neurons, const LifParams& lif,
                                  double w_lo, double w_hi, double alpha_base, double tau_ff,
                                  Rng& init_rng) {
  SpikingLayer layer{
      .weights = SynapseMatrix::random_uniform(input_dim, neurons, w_lo, w_hi, init_rng),
      .state = LayerState::at_rest(neurons, lif),
      .traces = TraceState::zeros(input_dim, neurons),
      .ff = FiringFactorState::fresh(neurons, alpha_base, tau_ff),
      .meta = std::vector<NeuronMeta>(neurons),
  };
  return layer;
}

std::vector<double> compute_asr(const SpikeTrain& raster, int window) {
  if (window <= 0) throw std::invalid_argument("compute_asr: window must be positive");
  if (window > raster.duration())
    throw std::invalid_argument("compute_asr: window exceeds raster duration");

  const int start = raster.duration() - window;
  std::vector<double> asr(static_cast<size_t>(raster.channels()), 0.0);
  for (int t = start; t < raster.duration(); ++t) {
    const uint8_t* row = raster.row(t);
    for (int c = 0; c < raster.channels(); ++c) asr[static_cast<size_t>(c)] += row[c];
  }
  for (auto& r : asr) r /= static_cast<double>(window);
  return asr;
}

std::pair<size_t, size_t> find_bmu_sbmu(std::span<const double> asr) {
  if (asr.size() < 2) throw std::invalid_argument("find_bmu_sbmu: need at least two neurons");
  size_t bmu = 0;
  for (size_t i = 1; i < asr.size(); ++i)
    if (asr[i] > asr[bmu]) bmu = i;
  size_t sbmu = (bmu == 0) ? 1 : 0;
  for (size_t i = 0; i < asr.size(); ++i) {
    if (i == bmu) continue;
    if (asr[i] > asr[sbmu]) sbmu = i;
  }
  return {bmu, sbmu};
}

bool should_grow(double asr_bmu, double f_bmu, const GrowthConfig& cfg, size_t live_count) {
  return asr_bmu < cfg.a_th && f_bmu < cfg.f_th && live_count < cfg.max_neurons;
}

void grow_neuron(SpikingLayer& layer, size_t bmu, const GrowthConfig& cfg,
                 const PlasticityConfig& plast, const LifParams& lif, Rng& rng) {
  if (layer.neurons() >= cfg.max_neurons)
    throw std::invalid_argument("grow_neuron: layer is at max_neurons");
  if (bmu >= layer.neurons()) throw std::invalid_argument("grow_neuron: bmu out of range");

  std::vector<double> w = layer.weights.incoming(bmu);
  const double sigma = cfg.noise_sigma * (plast.w_max - plast.w_min);
  for (auto& x : w) {
    if (sigma > 0.0) x += rng.normal(0.0, sigma);
    x = std::clamp(x, plast.w_min, plast.w_max);
  }

  layer.weights.add_neuron(w);
  layer.state.add_neuron(lif);
  layer.traces.add_neuron();
  layer.ff.add_neuron();
  layer.meta.push_back(NeuronMeta{});
}

std::vector<size_t> prune(SpikingLayer& layer, const GrowthConfig& cfg) {
  std::vector<size_t> offenders;
  for (size_t i = 0; i < layer.neurons(); ++i)
    if (layer.meta[i].age > cfg.age_max && layer.ff.f[i] > cfg.p_th) offenders.push_back(i);

  // floor: at least two neurons stay alive; retain the oldest offenders
  const size_t removable = layer.neurons() > 2 ? layer.neurons() - 2 : 0;
  if (offenders.size() > removable) {
    std::sort(offenders.begin(), offenders.end(), [&](size_t a, size_t b) {
      if (layer.meta[a].age != layer.meta[b].age) return layer.meta[a].age > layer.meta[b].age;
      return a < b;
    });
    offenders.erase(offenders.begin(),
                    offenders.begin() + static_cast<ptrdiff_t>(offenders.size() - removable));
  }
  std::sort(offenders.begin(), offenders.end());
  if (offenders.empty()) return offenders;

  layer.weights.remove_neurons(offenders);
  layer.state.remove_neurons(offenders);
  layer.traces.remove_neurons(offenders);
  layer.ff.remove_neurons(offenders);
  for (auto it = offenders.rbegin(); it != offenders.rend(); ++it)
    layer.meta.erase(layer.meta.begin() + static_cast<ptrdiff_t>(*it));

  return offenders;
}

void increment_ages(std::vector<NeuronMeta>& metas) {
  for (auto& m : metas) ++m.age;
}

}  // namespace dsnn
