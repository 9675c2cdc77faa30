#include "dsnn/checkpoint.hpp"

#include <fstream>
#include <stdexcept>

namespace dsnn {

namespace {

using nlohmann::json;

json module_config_to_json(const ModuleConfig& m) {
  return {
      {"encoder",
       {{"max_rate_hz", m.encoder.max_rate_hz},
        {"dt_s", m.encoder.dt_s},
        {"duration", m.encoder.duration}}},
      {"lif",
       {{"v_rest", m.lif.v_rest},
        {"v_reset", m.lif.v_reset},
        {"v_thresh_base", m.lif.v_thresh_base},
        {"tau_mem_ms", m.lif.tau_mem_ms},
        {"dt_ms", m.lif.dt_ms},
        {"refractory_steps", m.lif.refractory_steps},
        {"theta_plus", m.lif.theta_plus},
        {"tau_theta_ms", m.lif.tau_theta_ms},
        {"inhibition_strength", m.lif.inhibition_strength}}},
      {"plasticity",
       {{"a_plus", m.plasticity.a_plus},
        {"a_minus", m.plasticity.a_minus},
        {"tau_pre_ms", m.plasticity.tau_pre_ms},
        {"tau_post_ms", m.plasticity.tau_post_ms},
        {"w_min", m.plasticity.w_min},
        {"w_max", m.plasticity.w_max}}},
      {"mode", m.mode == PlasticityMode::adaptive ? "adaptive" : "standard"},
      {"ff_side", m.ff_side == FiringFactorSide::excitatory ? "excitatory" : "presynaptic"},
      {"weight_norm", m.weight_norm},
      {"weight_norm_target", m.weight_norm_target},
      {"asr_window", m.asr_window},
      {"w_init_lo", m.w_init_lo},
      {"w_init_hi", m.w_init_hi},
  };
}

ModuleConfig module_config_from_json(const json& j) {
  ModuleConfig m;
  const auto& e = j.at("encoder");
  m.encoder.max_rate_hz = e.at("max_rate_hz").get<double>();
  m.encoder.dt_s = e.at("dt_s").get<double>();
  m.encoder.duration = e.at("duration").get<int>();
  const auto& l = j.at("lif");
  m.lif.v_rest = l.at("v_rest").get<double>();
  m.lif.v_reset = l.at("v_reset").get<double>();
  m.lif.v_thresh_base = l.at("v_thresh_base").get<double>();
  m.lif.tau_mem_ms = l.at("tau_mem_ms").get<double>();
  m.lif.dt_ms = l.at("dt_ms").get<double>();
  m.lif.refractory_steps = l.at("refractory_steps").get<int>();
  m.lif.theta_plus = l.at("theta_plus").get<double>();
  m.lif.tau_theta_ms = l.at("tau_theta_ms").get<double>();
  m.lif.inhibition_strength = l.at("inhibition_strength").get<double>();
  const auto& p = j.at("plasticity");
  m.plasticity.a_plus = p.at("a_plus").get<double>();
  m.plasticity.a_minus = p.at("a_minus").get<double>();
  m.plasticity.tau_pre_ms = p.at("tau_pre_ms").get<double>();
  m.plasticity.tau_post_ms = p.at("tau_post_ms").get<double>();
  m.plasticity.w_min = p.at("w_min").get<double>();
  m.plasticity.w_max = p.at("w_max").get<double>();
  m.mode = j.at("mode").get<std::string>() == "adaptive" ? PlasticityMode::adaptive
                                                         : PlasticityMode::standard;
  m.ff_side = j.at("ff_side").get<std::string>() == "excitatory"
                  ? FiringFactorSide::excitatory
                  : FiringFactorSide::presynaptic;
  m.weight_norm = j.at("weight_norm").get<bool>();
  m.weight_norm_target = j.at("weight_norm_target").get<double>();
  m.asr_window = j.at("asr_window").get<int>();
  m.w_init_lo = j.at("w_init_lo").get<double>();
  m.w_init_hi = j.at("w_init_hi").get<double>();
  return m;
}

json growth_config_to_json(const GrowthConfig& g) {
  return {{"a_th", g.a_th},
          {"f_th", g.f_th},
          {"p_th", g.p_th},
          {"age_max", g.age_max},
          {"max_neurons", g.max_neurons},
          {"init_neurons", g.init_neurons},
          {"noise_sigma", g.noise_sigma},
          {"batch_size", g.batch_size},
          {"growth_enabled", g.growth_enabled},
          {"prune_enabled", g.prune_enabled}};
}

GrowthConfig growth_config_from_json(const json& j) {
  GrowthConfig g;
  g.a_th = j.at("a_th").get<double>();
  g.f_th = j.at("f_th").get<double>();
  g.p_th = j.at("p_th").get<double>();
  g.age_max = j.at("age_max").get<uint64_t>();
  g.max_neurons = j.at("max_neurons").get<size_t>();
  g.init_neurons = j.at("init_neurons").get<size_t>();
  g.noise_sigma = j.at("noise_sigma").get<double>();
  g.batch_size = j.at("batch_size").get<size_t>();
  g.growth_enabled = j.at("growth_enabled").get<bool>();
  g.prune_enabled = j.at("prune_enabled").get<bool>();
  return g;
}

json label_map_to_json(const LabelMap& m) {
  return {{"labels", m.labels},
          {"class_mean_asr", m.class_mean_asr},
          {"class_covered", m.class_covered},
          {"num_classes", m.num_classes}};
}

LabelMap label_map_from_json(const json& j) {
  LabelMap m;
  m.labels = j.at("labels").get<std::vector<int>>();
  m.class_mean_asr = j.at("class_mean_asr").get<std::vector<std::vector<double>>>();
  m.class_covered = j.at("class_covered").get<std::vector<uint8_t>>();
  m.num_classes = j.at("num_classes").get<size_t>();
  return m;
}

json layer_to_json(const SpikingLayer& layer) {
  std::vector<double> flat;
  flat.reserve(layer.input_dim() * layer.neurons());
  for (size_t i = 0; i < layer.input_dim(); ++i)
    for (size_t j = 0; j < layer.neurons(); ++j) flat.push_back(layer.weights.get(i, j));

  json meta = json::array();
  for (const auto& m : layer.meta) meta.push_back({{"age", m.age}, {"label", m.label}});

  return {{"input_dim", layer.input_dim()},
          {"neurons", layer.neurons()},
          {"weights", flat},
          {"theta", layer.state.theta},
          {"ff",
           {{"f", layer.ff.f},
            {"exposure", layer.ff.exposure},
            {"n", layer.ff.n},
            {"alpha_base", layer.ff.alpha_base},
            {"tau_ff", layer.ff.tau_ff}}},
          {"meta", meta}};
}

SpikingLayer layer_from_json(const json& j, const LifParams& lif) {
  const size_t input_dim = j.at("input_dim").get<size_t>();
  const size_t neurons = j.at("neurons").get<size_t>();
  const auto flat = j.at("weights").get<std::vector<double>>();
  if (flat.size() != input_dim * neurons)
    throw std::runtime_error("checkpoint: weight array size mismatch");

  SpikingLayer layer{
      .weights = SynapseMatrix(input_dim, neurons),
      .state = LayerState::at_rest(neurons, lif),
      .traces = TraceState::zeros(input_dim, neurons),
      .ff = {},
      .meta = {},
  };
  for (size_t i = 0; i < input_dim; ++i)
    for (size_t jn = 0; jn < neurons; ++jn) layer.weights.set(i, jn, flat[i * neurons + jn]);

  layer.state.theta = j.at("theta").get<std::vector<double>>();
  if (layer.state.theta.size() != neurons)
    throw std::runtime_error("checkpoint: theta size mismatch");

  const auto& ff = j.at("ff");
  layer.ff.f = ff.at("f").get<std::vector<double>>();
  layer.ff.exposure = ff.at("exposure").get<std::vector<double>>();
  layer.ff.n = ff.at("n").get<std::vector<uint64_t>>();
  layer.ff.alpha_base = ff.at("alpha_base").get<double>();
  layer.ff.tau_ff = ff.at("tau_ff").get<double>();
  if (layer.ff.size() != neurons) throw std::runtime_error("checkpoint: ff size mismatch");

  for (const auto& m : j.at("meta")) {
    layer.meta.push_back(NeuronMeta{m.at("age").get<uint64_t>(), m.at("label").get<int>()});
  }
  if (layer.meta.size() != neurons) throw std::runtime_error("checkpoint: meta size mismatch");
  return layer;
}

}  // namespace

nlohmann::json checkpoint_to_json(const PhaseOneModel& phase1, const PhaseTwoModel& phase2) {
  json events = json::array();
  for (const auto& e : phase2.events)
    events.push_back({{"batch", e.batch}, {"event", e.kind}, {"neuron_id", e.neuron}});

  return {{"format_version", 1},
          {"phase1",
           {{"layer", layer_to_json(phase1.layer)},
            {"config", module_config_to_json(phase1.cfg)},
            {"labels", label_map_to_json(phase1.labels)}}},
          {"phase2",
           {{"layer", layer_to_json(phase2.layer)},
            {"config", module_config_to_json(phase2.cfg)},
            {"growth", growth_config_to_json(phase2.growth)},
            {"labels", label_map_to_json(phase2.labels)},
            {"events", events},
            {"trajectory", phase2.trajectory},
            {"batches_done", phase2.batches_done},
            {"growth_events", phase2.growth_events}}}};
}

CheckpointPair checkpoint_from_json(const nlohmann::json& j) {
  if (!j.contains("format_version") || j.at("format_version").get<int>() != 1)
    throw std::runtime_error("checkpoint: unsupported or missing format_version");

  CheckpointPair pair;
  const auto& p1 = j.at("phase1");
  pair.phase1.cfg = module_config_from_json(p1.at("config"));
  pair.phase1.layer = layer_from_json(p1.at("layer"), pair.phase1.cfg.lif);
  pair.phase1.labels = label_map_from_json(p1.at("labels"));

  const auto& p2 = j.at("phase2");
  pair.phase2.cfg = module_config_from_json(p2.at("config"));
  pair.phase2.layer = layer_from_json(p2.at("layer"), pair.phase2.cfg.lif);
  pair.phase2.growth = growth_config_from_json(p2.at("growth"));
  pair.phase2.labels = label_map_from_json(p2.at("labels"));
  for (const auto& e : p2.at("events"))
    pair.phase2.events.push_back({e.at("batch").get<uint64_t>(),
                                  e.at("event").get<std::string>(),
                                  e.at("neuron_id").get<size_t>()});
  pair.phase2.trajectory = p2.at("trajectory").get<std::vector<size_t>>();
  pair.phase2.batches_done = p2.at("batches_done").get<uint64_t>();
  pair.phase2.growth_events = p2.at("growth_events").get<uint64_t>();
  return pair;
}

void save_checkpoint(const std::string& path, const PhaseOneModel& phase1,
                     const PhaseTwoModel& phase2) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("checkpoint: cannot write " + path);
  out << checkpoint_to_json(phase1, phase2).dump(2) << '\n';
}

CheckpointPair load_checkpoint(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("checkpoint: cannot open " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::parse_error& e) {
    throw std::runtime_error("checkpoint: corrupt file " + path + ": " + e.what());
  }
  return checkpoint_from_json(j);
}

}  // namespace dsnn
