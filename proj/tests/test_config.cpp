#include "doctest.h"

#include <stdexcept>

#include "dsnn/config.hpp"
#include "dsnn/rng.hpp"

using namespace dsnn;

TEST_CASE("defaults materialize into the persisted copy") {
  const ExperimentConfig cfg;
  const auto j = cfg.to_json();
  // spot-check a few spec'd defaults
  CHECK(j.at("encoding").at("max_rate_hz") == 63.75);
  CHECK(j.at("encoding").at("duration") == 200);
  CHECK(j.at("lif").at("v_rest") == -65.0);
  CHECK(j.at("plasticity").at("a_minus") == -0.012);
  CHECK(j.at("growth").at("p_th") == 0.9);
  CHECK(j.at("phase1").at("neurons") == 100);

  // a minimal config round-trips to the same fully-populated snapshot
  const auto from_empty = ExperimentConfig::from_json(nlohmann::json::object());
  CHECK(from_empty.to_json() == j);
}

TEST_CASE("unknown keys are rejected at every level") {
  CHECK_THROWS_AS(ExperimentConfig::from_json({{"definitely_not_a_key", 1}}),
                  std::invalid_argument);
  CHECK_THROWS_AS(ExperimentConfig::from_json({{"lif", {{"v_resting", -65}}}}),
                  std::invalid_argument);
  CHECK_THROWS_AS(ExperimentConfig::from_json({{"growth", {{"ath", 0.1}}}}),
                  std::invalid_argument);
}

TEST_CASE("cross-field invariants are validated on load") {
  nlohmann::json j = {{"growth", {{"f_th", 0.9}, {"p_th", 0.3}}}};
  CHECK_THROWS_AS(ExperimentConfig::from_json(j), std::invalid_argument);

  nlohmann::json bad_rate = {{"encoding", {{"max_rate_hz", 5000.0}}}};
  CHECK_THROWS_AS(ExperimentConfig::from_json(bad_rate), std::invalid_argument);
}

TEST_CASE("static twin comes from the override block") {
  ExperimentConfig cfg = ExperimentConfig::synth_defaults();
  const auto twin = cfg.static_twin();
  CHECK_FALSE(twin.growth.growth_enabled);
  CHECK_FALSE(twin.growth.prune_enabled);
  CHECK(twin.phase2_mode == PlasticityMode::standard);
  CHECK(twin.growth.init_neurons == 8);
  // untouched fields carry over
  CHECK(twin.master_seed == cfg.master_seed);
  CHECK(twin.encoder.max_rate_hz == cfg.encoder.max_rate_hz);
  CHECK(twin.phase1_neurons == cfg.phase1_neurons);
}

TEST_CASE("seed tree: stable named sub-streams") {
  const SeedTree seeds(42);
  CHECK(seeds.derive("encode") == SeedTree(42).derive("encode"));
  CHECK(seeds.derive("encode") != seeds.derive("split"));
  CHECK(seeds.derive("encode", 0) != seeds.derive("encode", 1));
  CHECK(SeedTree(42).derive("encode", 7) == seeds.derive("encode", 7));
  CHECK(SeedTree(43).derive("encode") != seeds.derive("encode"));
}

TEST_CASE("rng: deterministic streams and sane uniforms") {
  Rng a(5), b(5);
  for (int k = 0; k < 1000; ++k) {
    const double u = a.uniform();
    CHECK(u == b.uniform());
    CHECK(u >= 0.0);
    CHECK(u < 1.0);
  }
  // normal() draws stay finite and roughly centered
  Rng n(9);
  double sum = 0.0;
  for (int k = 0; k < 10000; ++k) sum += n.normal(0.0, 1.0);
  CHECK(std::abs(sum / 10000.0) < 0.05);
}

TEST_CASE("unsw defaults: 42 shipped feature names match the schema") {
  const auto& cols = unsw_nb15_columns();
  const auto& names = unsw_nb15_default_features();
  CHECK(cols.size() == 42);
  CHECK(names.size() == 42);
  DataConfig data;
  data.task_groups = {{"DoS", "Reconnaissance"}, {"Backdoor", "Generic"}};
  const auto schema = data.schema();
  CHECK(schema.feature_count() == 42);
  CHECK(schema.label_column == "label");
}
