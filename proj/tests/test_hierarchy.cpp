#include "doctest.h"

#include <stdexcept>

#include "dsnn/checkpoint.hpp"
#include "dsnn/config.hpp"
#include "dsnn/experiment.hpp"
#include "dsnn/hierarchy.hpp"

using namespace dsnn;

namespace {

ModuleConfig desk_module() {
  const auto cfg = ExperimentConfig::synth_defaults();
  return cfg.phase1_module();
}

}  // namespace

TEST_CASE("build_phase2_input: layout contract") {
  FeatureVector features(42, 0.5);
  std::vector<double> asr(100, 0.0);
  asr[0] = 0.25;
  const auto input = build_phase2_input(features, asr);
  REQUIRE(input.size() == 142);
  CHECK(input[0] == 0.5);
  CHECK(input[42] == 0.25);  // element 42 is ASR element 0

  // zero ASR means zero padding past the raw features
  const auto padded = build_phase2_input(features, std::vector<double>(100, 0.0));
  for (size_t i = 42; i < 142; ++i) CHECK(padded[i] == 0.0);
}

TEST_CASE("phase1_activity: silence, bounds, determinism") {
  auto model = make_phase1(8, 10, desk_module(), 123);

  const auto zero_asr = phase1_activity(model, FeatureVector(8, 0.0), 7);
  for (double r : zero_asr) CHECK(r == 0.0);

  const FeatureVector x = {0.9, 0.8, 0.7, 0.9, 0.1, 0.0, 0.2, 0.1};
  const auto a = phase1_activity(model, x, 7);
  const auto b = phase1_activity(model, x, 7);
  CHECK(a == b);
  for (double r : a) {
    CHECK(r >= 0.0);
    CHECK(r <= 1.0);
  }
  CHECK_THROWS_AS(phase1_activity(model, FeatureVector(3, 0.1), 7), std::invalid_argument);
}

TEST_CASE("train_phase1: determinism and weight bounds") {
  const auto cfg = desk_module();
  SeedTree seeds(77);

  std::vector<FeatureVector> stream;
  Rng rng(5);
  for (int k = 0; k < 40; ++k) {
    FeatureVector x(8);
    for (auto& v : x) v = rng.uniform();
    stream.push_back(x);
  }

  auto a = make_phase1(8, 10, cfg, seeds.derive("init/p1"));
  auto b = make_phase1(8, 10, cfg, seeds.derive("init/p1"));
  train_phase1(a, stream, 1, seeds, "t");
  train_phase1(b, stream, 1, seeds, "t");
  CHECK(a.layer.weights == b.layer.weights);
  CHECK(a.layer.state.theta == b.layer.state.theta);

  CHECK(a.layer.weights.min_weight() >= cfg.plasticity.w_min);
  CHECK(a.layer.weights.max_weight() <= cfg.plasticity.w_max);
  CHECK(a.neurons() == 10);  // architecture never changes

  CHECK_THROWS_AS(train_phase1(a, {}, 1, seeds, "t"), std::invalid_argument);
}

TEST_CASE("train_phase1: separated clusters claim distinct BMUs (purity oracle)") {
  // two well-separated synthetic clusters; nearest-centroid certifies the
  // data itself first
  const std::vector<ClusterSpec> clusters = {
      {{0.9, 0.9, 0.9, 0.9, 0.05, 0.05, 0.05, 0.05}, 0.03, 0, 60},
      {{0.05, 0.05, 0.05, 0.05, 0.9, 0.9, 0.9, 0.9}, 0.03, 1, 60},
  };
  const auto stream = synth_generate(clusters, 21);
  REQUIRE(nearest_centroid_accuracy(stream, clusters) >= 0.99);

  const auto cfg = desk_module();
  SeedTree seeds(11);
  auto model = make_phase1(8, 10, cfg, seeds.derive("init/p1"));
  train_phase1(model, stream.features, 2, seeds, "p1");

  // BMU-per-sample majority vote: assign each neuron the cluster it wins
  // most, then score samples by their BMU's assignment
  std::vector<std::array<size_t, 2>> wins(10, {0, 0});
  std::vector<size_t> bmu_of(stream.features.size());
  for (size_t i = 0; i < stream.features.size(); ++i) {
    const auto asr = phase1_activity(model, stream.features[i], seeds.derive("probe", i));
    const auto [bmu, sbmu] = find_bmu_sbmu(asr);
    bmu_of[i] = bmu;
    wins[bmu][static_cast<size_t>(stream.class_ids[i])] += 1;
  }
  size_t correct = 0;
  for (size_t i = 0; i < stream.features.size(); ++i) {
    const auto& w = wins[bmu_of[i]];
    const int majority = w[0] >= w[1] ? 0 : 1;
    if (majority == stream.class_ids[i]) ++correct;
  }
  const double purity = static_cast<double>(correct) / stream.features.size();
  CHECK(purity > 0.9);
}

TEST_CASE("train_phase2_task: saturation then novelty-driven growth") {
  const auto exp_cfg = ExperimentConfig::synth_defaults();
  const auto module = exp_cfg.phase2_module();
  SeedTree seeds(exp_cfg.master_seed);

  auto phase1 = make_phase1(8, 6, exp_cfg.phase1_module(), seeds.derive("init/p1"));
  // phase 1 left untrained: activity is still deterministic, which is all
  // the structural behaviour below depends on

  GrowthConfig growth = exp_cfg.growth;
  growth.init_neurons = 2;
  growth.max_neurons = 12;
  growth.batch_size = 8;

  auto model = make_phase2(8 + 6, module, growth, seeds.derive("init/p2"));

  // task 1: one repeated pattern family
  std::vector<FeatureVector> task1;
  Rng rng(3);
  for (int k = 0; k < 80; ++k) {
    FeatureVector x = {0.9, 0.9, 0.9, 0.9, 0.05, 0.05, 0.05, 0.05};
    for (auto& v : x) v = std::clamp(v + rng.normal(0.0, 0.02), 0.0, 1.0);
    task1.push_back(x);
  }
  train_phase2_task(model, phase1, task1, seeds, "task1");
  const size_t after_task1 = model.neurons();
  CHECK(after_task1 > 2);  // habituated-and-weak BMUs recruited capacity
  CHECK(after_task1 <= growth.max_neurons);

  // saturation: once some neuron answers the pattern above a_th the stream
  // stops recruiting (a rare sub-threshold dip may still add one)
  train_phase2_task(model, phase1, task1, seeds, "task1-again");
  CHECK(model.neurons() <= after_task1 + 1);

  // task 2: an orthogonal pattern family triggers further growth
  std::vector<FeatureVector> task2;
  for (int k = 0; k < 80; ++k) {
    FeatureVector x = {0.05, 0.05, 0.05, 0.05, 0.9, 0.9, 0.9, 0.9};
    for (auto& v : x) v = std::clamp(v + rng.normal(0.0, 0.02), 0.0, 1.0);
    task2.push_back(x);
  }
  train_phase2_task(model, phase1, task2, seeds, "task2");
  CHECK(model.neurons() > after_task1);
  CHECK(model.neurons() <= growth.max_neurons);

  CHECK_THROWS_AS(train_phase2_task(model, phase1, {}, seeds, "x"), std::invalid_argument);
}

TEST_CASE("infer: cascade gating and fallbacks") {
  const auto exp_cfg = ExperimentConfig::synth_defaults();
  SeedTree seeds(5);
  auto phase1 = make_phase1(4, 4, exp_cfg.phase1_module(), seeds.derive("p1"));
  auto phase2 = make_phase2(4 + 4, exp_cfg.phase2_module(), [] {
    GrowthConfig g;
    g.init_neurons = 2;
    g.max_neurons = 4;
    return g;
  }(), seeds.derive("p2"));

  // hand-labeled phase 1: neurons 0,1 benign, 2,3 attack
  phase1.labels.num_classes = 2;
  phase1.labels.labels = {0, 0, 1, 1};
  phase2.labels.num_classes = 2;
  phase2.labels.labels = {0, 1};

  SUBCASE("unlabeled phase 1 rejected") {
    PhaseOneModel fresh = make_phase1(4, 4, exp_cfg.phase1_module(), seeds.derive("p1"));
    PhaseTwoModel fresh2 = phase2;
    CHECK_THROWS_AS(infer(fresh, fresh2, FeatureVector(4, 0.1), 9), std::invalid_argument);
  }

  SUBCASE("silent phase 1 short-circuits as benign with zero phase-2 cost") {
    const auto pred = infer(phase1, phase2, FeatureVector(4, 0.0), 9);
    CHECK(pred.verdict == Prediction::Verdict::benign);
    CHECK_FALSE(pred.phase2_ran);
    CHECK(pred.phase2_spikes == 0);
  }

  SUBCASE("attack verdict runs phase 2 and yields a class or unknown") {
    // force the attack path: drive responds, benign group silenced by labels
    phase1.labels.labels = {1, 1, 1, 1};
    const auto pred = infer(phase1, phase2, FeatureVector(4, 1.0), 9);
    if (pred.verdict == Prediction::Verdict::attack) {
      CHECK(pred.phase2_ran);
      CHECK(pred.attack_class >= -1);
      CHECK(pred.attack_class < 2);
    } else {
      CHECK(pred.phase2_spikes == 0);  // benign only if phase 1 stayed silent
    }
  }

  SUBCASE("attack verdict with every labeled group silent falls back to unknown") {
    phase1.labels.labels = {1, 1, 1, 1};
    // dead phase-2 synapses: nothing can respond
    phase2.layer.weights = SynapseMatrix(phase2.input_dim(), phase2.neurons(), 0.0);
    const auto pred = infer(phase1, phase2, FeatureVector(4, 1.0), 9);
    if (pred.verdict == Prediction::Verdict::attack) {
      CHECK(pred.phase2_ran);
      CHECK(pred.attack_class == -1);  // tagged "unknown"
    }
  }
}

TEST_CASE("phase 1 stays frozen through phase-2 training and inference") {
  const auto exp_cfg = ExperimentConfig::synth_defaults();
  SeedTree seeds(31);
  auto phase1 = make_phase1(6, 5, exp_cfg.phase1_module(), seeds.derive("p1"));

  std::vector<FeatureVector> stream;
  Rng rng(2);
  for (int k = 0; k < 30; ++k) {
    FeatureVector x(6);
    for (auto& v : x) v = rng.uniform();
    stream.push_back(x);
  }
  train_phase1(phase1, stream, 1, seeds, "p1train");

  const auto weights_before = phase1.layer.weights;
  const auto theta_before = phase1.layer.state.theta;

  GrowthConfig growth;
  growth.init_neurons = 2;
  growth.max_neurons = 8;
  auto phase2 = make_phase2(6 + 5, exp_cfg.phase2_module(), growth, seeds.derive("p2"));
  train_phase2_task(phase2, phase1, stream, seeds, "p2task");

  CHECK(phase1.layer.weights == weights_before);
  CHECK(phase1.layer.state.theta == theta_before);
}

TEST_CASE("pruning waits out age_max batches after creation") {
  // init neurons never fire here (no training spikes -> f stays 1), so with
  // an aggressive p_th they are pruned exactly when age exceeds age_max:
  // prune runs before the age increment at each batch close, which makes a
  // neuron created at batch b removable no earlier than batch b+age_max+1
  const auto exp_cfg = ExperimentConfig::synth_defaults();
  SeedTree seeds(13);
  auto phase1 = make_phase1(4, 3, exp_cfg.phase1_module(), seeds.derive("p1"));

  GrowthConfig growth;
  growth.init_neurons = 3;
  growth.max_neurons = 8;
  growth.batch_size = 4;
  growth.age_max = 2;
  growth.f_th = 0.3;
  growth.p_th = 0.5;
  growth.growth_enabled = false;

  auto module = exp_cfg.phase2_module();
  auto model = make_phase2(4 + 3, module, growth, seeds.derive("p2"));

  // silent stream: all-zero features produce no spikes at all
  const std::vector<FeatureVector> stream(20, FeatureVector(4, 0.0));
  train_phase2_task(model, phase1, stream, seeds, "quiet");

  // 20 samples, batch 4 -> trajectory entries after batches 0..4
  REQUIRE(model.trajectory.size() == 6);
  CHECK(model.trajectory[0] == 3);  // initial
  CHECK(model.trajectory[1] == 3);  // after batch 0 (ages 0, not prunable)
  CHECK(model.trajectory[2] == 3);  // after batch 1 (ages 1)
  CHECK(model.trajectory[3] == 3);  // after batch 2 (ages 2, not > age_max)
  CHECK(model.trajectory[4] == 2);  // after batch 3: age 3 > 2, floor keeps 2
  CHECK(model.events.size() == 1);
  CHECK(model.events[0].kind == "prune");
  CHECK(model.events[0].batch == 3);
}

TEST_CASE("cascade inference is deterministic and thread-count invariant") {
  auto cfg = ExperimentConfig::synth_defaults();
  cfg.synth.train_per_class = 30;
  cfg.synth.test_per_class = 10;
  const auto data = build_synth_protocol(cfg);

  const auto a = run_protocol(cfg, data);
  cfg.threads = 3;
  const auto b = run_protocol(cfg, data);

  CHECK(a.accuracy_rows == b.accuracy_rows);
  CHECK(a.recall_rows == b.recall_rows);
  CHECK(a.report.confusion == b.report.confusion);
  CHECK(a.report.sparsity_phase1 == b.report.sparsity_phase1);
  CHECK(a.report.sparsity_phase2 == b.report.sparsity_phase2);
  CHECK(a.phase2.layer.weights == b.phase2.layer.weights);

  // repeat inference on the same sample and seed: identical predictions
  const auto p = infer(a.phase1, a.phase2, data.benign_test[0], 31337);
  const auto q = infer(a.phase1, a.phase2, data.benign_test[0], 31337);
  CHECK(p.verdict == q.verdict);
  CHECK(p.attack_class == q.attack_class);
  CHECK(p.phase1_asr == q.phase1_asr);
  CHECK(p.phase1_spikes == q.phase1_spikes);
  CHECK(p.phase2_spikes == q.phase2_spikes);
}

TEST_CASE("checkpoint: save/load round-trip preserves behaviour") {
  const auto exp_cfg = ExperimentConfig::synth_defaults();
  SeedTree seeds(exp_cfg.master_seed);

  auto phase1 = make_phase1(6, 5, exp_cfg.phase1_module(), seeds.derive("p1"));
  std::vector<FeatureVector> stream;
  Rng rng(4);
  for (int k = 0; k < 25; ++k) {
    FeatureVector x(6);
    for (auto& v : x) v = rng.uniform();
    stream.push_back(x);
  }
  train_phase1(phase1, stream, 1, seeds, "p1");
  phase1.labels = assign_labels({{0.2, 0.0, 0.0, 0.1, 0.0}}, {1}, 2);

  GrowthConfig growth;
  growth.init_neurons = 2;
  growth.max_neurons = 8;
  auto phase2 = make_phase2(6 + 5, exp_cfg.phase2_module(), growth, seeds.derive("p2"));
  train_phase2_task(phase2, phase1, stream, seeds, "p2");
  phase2.labels = assign_labels({{0.1, 0.3}}, {0}, 1);

  const auto j = checkpoint_to_json(phase1, phase2);
  const auto pair = checkpoint_from_json(j);

  CHECK(pair.phase1.layer.weights == phase1.layer.weights);
  CHECK(pair.phase1.layer.state.theta == phase1.layer.state.theta);
  CHECK(pair.phase2.layer.weights == phase2.layer.weights);
  CHECK(pair.phase2.layer.ff.f == phase2.layer.ff.f);
  CHECK(pair.phase2.layer.ff.exposure == phase2.layer.ff.exposure);
  CHECK(pair.phase2.labels.labels == phase2.labels.labels);
  CHECK(pair.phase2.trajectory == phase2.trajectory);

  // identical behaviour after the round trip
  const FeatureVector probe(6, 0.6);
  CHECK(phase1_activity(pair.phase1, probe, 99) == phase1_activity(phase1, probe, 99));

  // corrupt payloads are runtime errors
  nlohmann::json bad = j;
  bad["format_version"] = 2;
  CHECK_THROWS_AS(checkpoint_from_json(bad), std::runtime_error);
}
