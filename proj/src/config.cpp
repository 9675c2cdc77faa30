#include "dsnn/config.hpp"

#include <fstream>
#include <set>
#include <stdexcept>

namespace dsnn {

namespace {

using nlohmann::json;

void check_keys(const json& j, const std::set<std::string>& allowed, const std::string& where) {
  if (!j.is_object()) throw std::invalid_argument("config: " + where + " must be an object");
  for (const auto& item : j.items()) {
    if (!allowed.contains(item.key()))
      throw std::invalid_argument("config: unknown key '" + item.key() + "' in " + where);
  }
}

template <typename T>
void read(const json& j, const char* key, T& out) {
  if (j.contains(key)) out = j.at(key).get<T>();
}

void deep_merge(json& base, const json& patch) {
  if (!patch.is_object()) {
    base = patch;
    return;
  }
  if (!base.is_object()) base = json::object();
  for (const auto& item : patch.items()) {
    if (item.value().is_object() && base.contains(item.key()))
      deep_merge(base[item.key()], item.value());
    else
      base[item.key()] = item.value();
  }
}

std::string side_name(FiringFactorSide s) {
  return s == FiringFactorSide::excitatory ? "excitatory" : "presynaptic";
}

FiringFactorSide side_from(const std::string& s) {
  if (s == "excitatory") return FiringFactorSide::excitatory;
  if (s == "presynaptic") return FiringFactorSide::presynaptic;
  throw std::invalid_argument("config: ff_side must be 'excitatory' or 'presynaptic'");
}

std::string mode_name(PlasticityMode m) {
  return m == PlasticityMode::adaptive ? "adaptive" : "standard";
}

PlasticityMode mode_from(const std::string& s) {
  if (s == "adaptive") return PlasticityMode::adaptive;
  if (s == "standard") return PlasticityMode::standard;
  throw std::invalid_argument("config: plasticity_mode must be 'adaptive' or 'standard'");
}

}  // namespace

// ---------------------------------------------------------------------------
// Synth protocol
// ---------------------------------------------------------------------------

void SynthConfig::validate() const {
  if (dims == 0) throw std::invalid_argument("synth: dims must be positive");
  if (attack_classes == 0) throw std::invalid_argument("synth: need at least one attack class");
  if (hot_dims * attack_classes > dims)
    throw std::invalid_argument("synth: hot_dims * attack_classes exceeds dims");
  if (!(benign_level >= 0.0 && benign_level <= 1.0 && hot_level >= 0.0 && hot_level <= 1.0))
    throw std::invalid_argument("synth: levels must lie in [0,1]");
  if (spread < 0.0) throw std::invalid_argument("synth: spread must be non-negative");
  if (train_per_class == 0 || test_per_class == 0)
    throw std::invalid_argument("synth: per-class counts must be positive");
  if (task_groups.empty()) throw std::invalid_argument("synth: no task groups");
  std::set<int> seen;
  for (const auto& g : task_groups)
    for (int c : g) {
      if (c < 1 || static_cast<size_t>(c) > attack_classes)
        throw std::invalid_argument("synth: task group class id out of range");
      if (!seen.insert(c).second) throw std::invalid_argument("synth: overlapping task groups");
    }
}

namespace {

std::vector<ClusterSpec> synth_clusters(const SynthConfig& s, size_t per_class,
                                        size_t benign_count) {
  std::vector<ClusterSpec> out;
  ClusterSpec benign{.centroid = FeatureVector(s.dims, s.benign_level),
                     .spread = s.spread,
                     .class_id = 0,
                     .count = benign_count};
  out.push_back(std::move(benign));
  for (size_t c = 1; c <= s.attack_classes; ++c) {
    ClusterSpec attack{.centroid = FeatureVector(s.dims, s.benign_level),
                       .spread = s.spread,
                       .class_id = static_cast<int>(c),
                       .count = per_class};
    for (size_t d = s.hot_dims * (c - 1); d < s.hot_dims * c; ++d)
      attack.centroid[d] = s.hot_level;
    out.push_back(std::move(attack));
  }
  return out;
}

}  // namespace

std::vector<ClusterSpec> SynthConfig::train_clusters() const {
  // one benign slice per task, so every task sees fresh benign traffic
  return synth_clusters(*this, train_per_class, train_per_class * num_tasks());
}

std::vector<ClusterSpec> SynthConfig::test_clusters() const {
  return synth_clusters(*this, test_per_class, test_per_class * num_tasks());
}

// ---------------------------------------------------------------------------
// Data
// ---------------------------------------------------------------------------

const std::vector<ColumnSpec>& unsw_nb15_columns() {
  static const std::vector<ColumnSpec> cols = {
      {"dur", ColumnKind::numeric},         {"proto", ColumnKind::categorical},
      {"service", ColumnKind::categorical}, {"state", ColumnKind::categorical},
      {"spkts", ColumnKind::numeric},       {"dpkts", ColumnKind::numeric},
      {"sbytes", ColumnKind::numeric},      {"dbytes", ColumnKind::numeric},
      {"rate", ColumnKind::numeric},        {"sttl", ColumnKind::numeric},
      {"dttl", ColumnKind::numeric},        {"sload", ColumnKind::numeric},
      {"dload", ColumnKind::numeric},       {"sloss", ColumnKind::numeric},
      {"dloss", ColumnKind::numeric},       {"sinpkt", ColumnKind::numeric},
      {"dinpkt", ColumnKind::numeric},      {"sjit", ColumnKind::numeric},
      {"djit", ColumnKind::numeric},        {"swin", ColumnKind::numeric},
      {"stcpb", ColumnKind::numeric},       {"dtcpb", ColumnKind::numeric},
      {"dwin", ColumnKind::numeric},        {"tcprtt", ColumnKind::numeric},
      {"synack", ColumnKind::numeric},      {"ackdat", ColumnKind::numeric},
      {"smean", ColumnKind::numeric},       {"dmean", ColumnKind::numeric},
      {"trans_depth", ColumnKind::numeric}, {"response_body_len", ColumnKind::numeric},
      {"ct_srv_src", ColumnKind::numeric},  {"ct_state_ttl", ColumnKind::numeric},
      {"ct_dst_ltm", ColumnKind::numeric},  {"ct_src_dport_ltm", ColumnKind::numeric},
      {"ct_dst_sport_ltm", ColumnKind::numeric}, {"ct_dst_src_ltm", ColumnKind::numeric},
      {"is_ftp_login", ColumnKind::numeric}, {"ct_ftp_cmd", ColumnKind::numeric},
      {"ct_flw_http_mthd", ColumnKind::numeric}, {"ct_src_ltm", ColumnKind::numeric},
      {"ct_srv_dst", ColumnKind::numeric},  {"is_sm_ips_ports", ColumnKind::numeric},
  };
  return cols;
}

const std::vector<std::string>& unsw_nb15_default_features() {
  static const std::vector<std::string> names = [] {
    std::vector<std::string> v;
    for (const auto& c : unsw_nb15_columns()) v.push_back(c.name);
    return v;
  }();
  return names;
}

CsvSchema DataConfig::schema() const {
  CsvSchema s;
  s.columns = schema_columns.empty() ? unsw_nb15_columns() : schema_columns;
  s.label_column = "label";
  s.category_column = "attack_cat";
  s.benign_category = benign_category;
  s.has_header = has_header;
  return s;
}

std::vector<std::string> DataConfig::class_registry() const {
  std::vector<std::string> reg{benign_category};
  for (const auto& group : task_groups)
    for (const auto& name : group) reg.push_back(name);
  for (const auto& name : excluded) reg.push_back(name);
  return reg;
}

std::vector<std::string> DataConfig::effective_feature_list() const {
  if (!feature_list.empty()) return feature_list;
  return unsw_nb15_default_features();
}

// ---------------------------------------------------------------------------
// Experiment config
// ---------------------------------------------------------------------------

void ExperimentConfig::validate() const {
  encoder.validate();
  lif.validate();
  plasticity.validate();
  growth.validate();
  phase1_module().validate();
  phase2_module().validate();
  synth.validate();
  if (threads < 1) throw std::invalid_argument("config: threads must be at least 1");
  if (phase1_neurons < 2) throw std::invalid_argument("config: phase1 needs at least 2 neurons");
  if (phase1_epochs < 1) throw std::invalid_argument("config: phase1 epochs must be at least 1");
  if (!(labeled_fraction > 0.0 && labeled_fraction <= 1.0))
    throw std::invalid_argument("config: labeled_fraction must be in (0,1]");
  if (alpha_base <= 0.0 || tau_ff <= 0.0)
    throw std::invalid_argument("config: alpha_base and tau_ff must be positive");
  if (data.source != "synth" && data.source != "cache")
    throw std::invalid_argument("config: data.source must be 'synth' or 'cache'");
}

ModuleConfig ExperimentConfig::phase1_module() const {
  ModuleConfig m{.encoder = encoder,
                 .lif = lif,
                 .plasticity = plasticity,
                 .mode = PlasticityMode::standard,
                 .ff_side = ff_side,
                 .weight_norm = weight_norm,
                 .weight_norm_target = weight_norm_target,
                 .asr_window = asr_window,
                 .w_init_lo = w_init_lo,
                 .w_init_hi = w_init_hi};
  return m;
}

ModuleConfig ExperimentConfig::phase2_module() const {
  ModuleConfig m = phase1_module();
  m.mode = phase2_mode;
  return m;
}

nlohmann::json ExperimentConfig::to_json() const {
  json j;
  j["master_seed"] = master_seed;
  j["threads"] = threads;
  j["output_dir"] = output_dir;
  j["encoding"] = {{"max_rate_hz", encoder.max_rate_hz},
                   {"dt_s", encoder.dt_s},
                   {"duration", encoder.duration}};
  j["lif"] = {{"v_rest", lif.v_rest},
              {"v_reset", lif.v_reset},
              {"v_thresh_base", lif.v_thresh_base},
              {"tau_mem_ms", lif.tau_mem_ms},
              {"dt_ms", lif.dt_ms},
              {"refractory_steps", lif.refractory_steps},
              {"theta_plus", lif.theta_plus},
              {"tau_theta_ms", lif.tau_theta_ms},
              {"inhibition_strength", lif.inhibition_strength}};
  j["plasticity"] = {{"a_plus", plasticity.a_plus},
                     {"a_minus", plasticity.a_minus},
                     {"tau_pre_ms", plasticity.tau_pre_ms},
                     {"tau_post_ms", plasticity.tau_post_ms},
                     {"w_min", plasticity.w_min},
                     {"w_max", plasticity.w_max},
                     {"alpha_base", alpha_base},
                     {"tau_ff", tau_ff},
                     {"ff_side", side_name(ff_side)},
                     {"weight_norm", weight_norm},
                     {"weight_norm_target", weight_norm_target},
                     {"w_init_lo", w_init_lo},
                     {"w_init_hi", w_init_hi}};
  j["growth"] = {{"a_th", growth.a_th},
                 {"f_th", growth.f_th},
                 {"p_th", growth.p_th},
                 {"age_max", growth.age_max},
                 {"max_neurons", growth.max_neurons},
                 {"init_neurons", growth.init_neurons},
                 {"noise_sigma", growth.noise_sigma},
                 {"batch_size", growth.batch_size},
                 {"growth_enabled", growth.growth_enabled},
                 {"prune_enabled", growth.prune_enabled},
                 {"asr_window", asr_window}};
  j["phase1"] = {{"neurons", phase1_neurons}, {"epochs", phase1_epochs}};
  j["phase2"] = {{"plasticity_mode", mode_name(phase2_mode)}};
  j["labeling"] = {{"labeled_fraction", labeled_fraction}};
  json cols = json::array();
  for (const auto& c : data.schema_columns)
    cols.push_back({{"name", c.name},
                    {"kind", c.kind == ColumnKind::numeric ? "numeric" : "categorical"}});
  j["data"] = {{"source", data.source},
               {"csv_paths", data.csv_paths},
               {"cache_dir", data.cache_dir},
               {"has_header", data.has_header},
               {"benign_category", data.benign_category},
               {"feature_list", data.feature_list},
               {"feature_count", data.feature_count},
               {"task_groups", data.task_groups},
               {"excluded", data.excluded},
               {"schema_columns", cols}};
  j["synth"] = {{"dims", synth.dims},
                {"attack_classes", synth.attack_classes},
                {"hot_dims", synth.hot_dims},
                {"benign_level", synth.benign_level},
                {"hot_level", synth.hot_level},
                {"spread", synth.spread},
                {"train_per_class", synth.train_per_class},
                {"test_per_class", synth.test_per_class},
                {"task_groups", synth.task_groups}};
  j["static_override"] = static_override;
  return j;
}

ExperimentConfig ExperimentConfig::from_json(const nlohmann::json& j) {
  check_keys(j,
             {"master_seed", "threads", "output_dir", "encoding", "lif", "plasticity", "growth",
              "phase1", "phase2", "labeling", "data", "synth", "static_override"},
             "top level");
  ExperimentConfig cfg;
  read(j, "master_seed", cfg.master_seed);
  read(j, "threads", cfg.threads);
  read(j, "output_dir", cfg.output_dir);

  if (j.contains("encoding")) {
    const auto& b = j.at("encoding");
    check_keys(b, {"max_rate_hz", "dt_s", "duration"}, "encoding");
    read(b, "max_rate_hz", cfg.encoder.max_rate_hz);
    read(b, "dt_s", cfg.encoder.dt_s);
    read(b, "duration", cfg.encoder.duration);
  }
  if (j.contains("lif")) {
    const auto& b = j.at("lif");
    check_keys(b,
               {"v_rest", "v_reset", "v_thresh_base", "tau_mem_ms", "dt_ms", "refractory_steps",
                "theta_plus", "tau_theta_ms", "inhibition_strength"},
               "lif");
    read(b, "v_rest", cfg.lif.v_rest);
    read(b, "v_reset", cfg.lif.v_reset);
    read(b, "v_thresh_base", cfg.lif.v_thresh_base);
    read(b, "tau_mem_ms", cfg.lif.tau_mem_ms);
    read(b, "dt_ms", cfg.lif.dt_ms);
    read(b, "refractory_steps", cfg.lif.refractory_steps);
    read(b, "theta_plus", cfg.lif.theta_plus);
    read(b, "tau_theta_ms", cfg.lif.tau_theta_ms);
    read(b, "inhibition_strength", cfg.lif.inhibition_strength);
  }
  if (j.contains("plasticity")) {
    const auto& b = j.at("plasticity");
    check_keys(b,
               {"a_plus", "a_minus", "tau_pre_ms", "tau_post_ms", "w_min", "w_max", "alpha_base",
                "tau_ff", "ff_side", "weight_norm", "weight_norm_target", "w_init_lo",
                "w_init_hi"},
               "plasticity");
    read(b, "a_plus", cfg.plasticity.a_plus);
    read(b, "a_minus", cfg.plasticity.a_minus);
    read(b, "tau_pre_ms", cfg.plasticity.tau_pre_ms);
    read(b, "tau_post_ms", cfg.plasticity.tau_post_ms);
    read(b, "w_min", cfg.plasticity.w_min);
    read(b, "w_max", cfg.plasticity.w_max);
    read(b, "alpha_base", cfg.alpha_base);
    read(b, "tau_ff", cfg.tau_ff);
    if (b.contains("ff_side")) cfg.ff_side = side_from(b.at("ff_side").get<std::string>());
    read(b, "weight_norm", cfg.weight_norm);
    read(b, "weight_norm_target", cfg.weight_norm_target);
    read(b, "w_init_lo", cfg.w_init_lo);
    read(b, "w_init_hi", cfg.w_init_hi);
  }
  if (j.contains("growth")) {
    const auto& b = j.at("growth");
    check_keys(b,
               {"a_th", "f_th", "p_th", "age_max", "max_neurons", "init_neurons", "noise_sigma",
                "batch_size", "growth_enabled", "prune_enabled", "asr_window"},
               "growth");
    read(b, "a_th", cfg.growth.a_th);
    read(b, "f_th", cfg.growth.f_th);
    read(b, "p_th", cfg.growth.p_th);
    read(b, "age_max", cfg.growth.age_max);
    read(b, "max_neurons", cfg.growth.max_neurons);
    read(b, "init_neurons", cfg.growth.init_neurons);
    read(b, "noise_sigma", cfg.growth.noise_sigma);
    read(b, "batch_size", cfg.growth.batch_size);
    read(b, "growth_enabled", cfg.growth.growth_enabled);
    read(b, "prune_enabled", cfg.growth.prune_enabled);
    read(b, "asr_window", cfg.asr_window);
  }
  if (j.contains("phase1")) {
    const auto& b = j.at("phase1");
    check_keys(b, {"neurons", "epochs"}, "phase1");
    read(b, "neurons", cfg.phase1_neurons);
    read(b, "epochs", cfg.phase1_epochs);
  }
  if (j.contains("phase2")) {
    const auto& b = j.at("phase2");
    check_keys(b, {"plasticity_mode"}, "phase2");
    if (b.contains("plasticity_mode"))
      cfg.phase2_mode = mode_from(b.at("plasticity_mode").get<std::string>());
  }
  if (j.contains("labeling")) {
    const auto& b = j.at("labeling");
    check_keys(b, {"labeled_fraction"}, "labeling");
    read(b, "labeled_fraction", cfg.labeled_fraction);
  }
  if (j.contains("data")) {
    const auto& b = j.at("data");
    check_keys(b,
               {"source", "csv_paths", "cache_dir", "has_header", "benign_category",
                "feature_list", "feature_count", "task_groups", "excluded", "schema_columns"},
               "data");
    read(b, "source", cfg.data.source);
    read(b, "csv_paths", cfg.data.csv_paths);
    read(b, "cache_dir", cfg.data.cache_dir);
    read(b, "has_header", cfg.data.has_header);
    read(b, "benign_category", cfg.data.benign_category);
    read(b, "feature_list", cfg.data.feature_list);
    read(b, "feature_count", cfg.data.feature_count);
    read(b, "task_groups", cfg.data.task_groups);
    read(b, "excluded", cfg.data.excluded);
    if (b.contains("schema_columns")) {
      cfg.data.schema_columns.clear();
      for (const auto& c : b.at("schema_columns")) {
        check_keys(c, {"name", "kind"}, "data.schema_columns");
        const std::string kind = c.at("kind").get<std::string>();
        if (kind != "numeric" && kind != "categorical")
          throw std::invalid_argument("config: column kind must be numeric or categorical");
        cfg.data.schema_columns.push_back(
            {c.at("name").get<std::string>(),
             kind == "numeric" ? ColumnKind::numeric : ColumnKind::categorical});
      }
    }
  }
  if (j.contains("synth")) {
    const auto& b = j.at("synth");
    check_keys(b,
               {"dims", "attack_classes", "hot_dims", "benign_level", "hot_level", "spread",
                "train_per_class", "test_per_class", "task_groups"},
               "synth");
    read(b, "dims", cfg.synth.dims);
    read(b, "attack_classes", cfg.synth.attack_classes);
    read(b, "hot_dims", cfg.synth.hot_dims);
    read(b, "benign_level", cfg.synth.benign_level);
    read(b, "hot_level", cfg.synth.hot_level);
    read(b, "spread", cfg.synth.spread);
    read(b, "train_per_class", cfg.synth.train_per_class);
    read(b, "test_per_class", cfg.synth.test_per_class);
    read(b, "task_groups", cfg.synth.task_groups);
  }
  if (j.contains("static_override")) cfg.static_override = j.at("static_override");

  cfg.validate();
  return cfg;
}

ExperimentConfig ExperimentConfig::load_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("config: cannot open " + path);
  json j;
  try {
    in >> j;
  } catch (const json::parse_error& e) {
    throw std::invalid_argument("config: parse error in " + path + ": " + e.what());
  }
  return from_json(j);
}

ExperimentConfig ExperimentConfig::static_twin() const {
  json merged = to_json();
  json patch = static_override;
  // the twin must not recurse into its own override
  patch["static_override"] = json::object();
  deep_merge(merged, patch);
  return from_json(merged);
}

nlohmann::json ExperimentConfig::default_static_override() {
  return {{"growth",
           {{"growth_enabled", false}, {"prune_enabled", false}, {"init_neurons", 8},
            {"max_neurons", 8}}},
          {"phase2", {{"plasticity_mode", "standard"}}}};
}

ExperimentConfig ExperimentConfig::synth_defaults() {
  ExperimentConfig cfg;
  cfg.data.source = "synth";
  cfg.phase1_neurons = 20;
  cfg.phase1_epochs = 1;

  // operating point: diffuse weights put the membrane equilibrium just
  // above threshold so untrained neurons respond, and normalization lets
  // winners concentrate their mass
  cfg.lif.v_thresh_base = -59.0;
  cfg.lif.refractory_steps = 10;
  cfg.lif.theta_plus = 0.005;
  cfg.lif.inhibition_strength = 15.0;
  cfg.plasticity.a_plus = 0.03;
  cfg.weight_norm = true;
  cfg.weight_norm_target = 0.25;
  cfg.w_init_lo = 0.2;
  cfg.w_init_hi = 0.3;

  cfg.growth.a_th = 0.015;
  cfg.growth.f_th = 0.3;
  cfg.growth.p_th = 0.9;
  cfg.growth.init_neurons = 2;
  cfg.growth.max_neurons = 32;
  cfg.growth.noise_sigma = 0.02;
  cfg.growth.batch_size = 16;
  cfg.growth.age_max = 500;
  return cfg;
}

}  // namespace dsnn
