#include "doctest.h"

#include <stdexcept>

#include <set>

#include "dsnn/topology.hpp"

using namespace dsnn;

namespace {

SpikingLayer small_layer(size_t inputs, size_t neurons, uint64_t seed) {
  Rng rng(seed);
  return SpikingLayer::create(inputs, neurons, LifParams{}, 0.3, 0.7, 1.0, 10.0, rng);
}

}  // namespace

TEST_CASE("compute_asr: arithmetic and bounds") {
  SpikeTrain raster(200, 3);
  for (int k = 0; k < 10; ++k) raster.set(k * 13, 1);  // 10 spikes on neuron 1
  for (int t = 0; t < 200; ++t) raster.set(t, 2);      // saturated neuron

  const auto asr = compute_asr(raster, 200);
  CHECK(asr[0] == 0.0);
  CHECK(asr[1] == doctest::Approx(0.05));
  CHECK(asr[2] == 1.0);
}

TEST_CASE("compute_asr: window validation") {
  SpikeTrain raster(100, 1);
  CHECK_THROWS_AS(compute_asr(raster, 0), std::invalid_argument);
  CHECK_THROWS_AS(compute_asr(raster, 101), std::invalid_argument);
}

TEST_CASE("find_bmu_sbmu: argmax with low-index tie-break") {
  CHECK(find_bmu_sbmu(std::vector<double>{0.2, 0.5, 0.1}) == std::pair<size_t, size_t>{1, 0});
  CHECK(find_bmu_sbmu(std::vector<double>{0.3, 0.3, 0.1}) == std::pair<size_t, size_t>{0, 1});
  CHECK(find_bmu_sbmu(std::vector<double>{0.0, 0.0, 0.0}) == std::pair<size_t, size_t>{0, 1});
  CHECK_THROWS_AS(find_bmu_sbmu(std::vector<double>{0.4}), std::invalid_argument);
}

TEST_CASE("should_grow: dual condition plus cap") {
  GrowthConfig cfg;
  cfg.a_th = 0.05;
  cfg.f_th = 0.2;
  cfg.max_neurons = 50;
  CHECK(should_grow(0.01, 0.1, cfg, 10));
  CHECK_FALSE(should_grow(0.01, 0.9, cfg, 10));  // plastic BMU learns it instead
  CHECK_FALSE(should_grow(0.2, 0.1, cfg, 10));   // responded fine
  CHECK_FALSE(should_grow(0.01, 0.1, cfg, 50));  // at cap
}

TEST_CASE("grow_neuron: zero noise copies the BMU exactly, locality holds") {
  auto layer = small_layer(5, 3, 99);
  GrowthConfig cfg;
  cfg.noise_sigma = 0.0;
  const auto before_weights = layer.weights;
  const auto before_meta = layer.meta;
  const auto before_f = layer.ff.f;

  Rng rng(1);
  grow_neuron(layer, 1, cfg, PlasticityConfig{}, LifParams{}, rng);

  REQUIRE(layer.neurons() == 4);
  CHECK(layer.weights.incoming(3) == before_weights.incoming(1));
  CHECK(layer.meta[3].age == 0);
  CHECK(layer.ff.f[3] == 1.0);
  CHECK(layer.ff.exposure[3] == 0.0);
  CHECK(layer.state.theta[3] == 0.0);
  CHECK(layer.state.v[3] == LifParams{}.v_rest);

  // existing neurons untouched
  for (size_t j = 0; j < 3; ++j) {
    CHECK(layer.weights.incoming(j) == before_weights.incoming(j));
    CHECK(layer.meta[j] == before_meta[j]);
    CHECK(layer.ff.f[j] == before_f[j]);
  }
}

TEST_CASE("grow_neuron: fresh factor exceeds any habituated peer") {
  auto layer = small_layer(4, 2, 3);
  for (int k = 0; k < 30; ++k) layer.ff.record_selection(0, 1, 0.5, 0.2);
  GrowthConfig cfg;
  Rng rng(2);
  grow_neuron(layer, 0, cfg, PlasticityConfig{}, LifParams{}, rng);
  CHECK(layer.ff.f[2] == 1.0);
  CHECK(layer.ff.f[2] > layer.ff.f[0]);
  CHECK(layer.ff.f[2] > layer.ff.f[1]);
}

TEST_CASE("prune: rule by definition and the two-neuron floor") {
  GrowthConfig cfg;
  cfg.age_max = 500;
  cfg.p_th = 0.9;

  SUBCASE("old and unspecialized goes, old and specialized stays") {
    auto layer = small_layer(4, 3, 7);
    layer.meta[0].age = 501;
    layer.ff.f[0] = 0.95;  // offender
    layer.meta[1].age = 501;
    layer.ff.f[1] = 0.3;  // specialized: kept
    layer.meta[2].age = 10;
    layer.ff.f[2] = 0.95;  // young: kept
    const auto removed = prune(layer, cfg);
    CHECK(removed == std::vector<size_t>{0});
    CHECK(layer.neurons() == 2);
  }

  SUBCASE("floor: a fully prunable 3-neuron net loses exactly one") {
    auto layer = small_layer(4, 3, 8);
    for (size_t j = 0; j < 3; ++j) {
      layer.meta[j].age = 600 + j;  // ages 600, 601, 602
      layer.ff.f[j] = 0.95;
    }
    const auto removed = prune(layer, cfg);
    REQUIRE(removed.size() == 1);
    CHECK(layer.neurons() == 2);
    // the oldest offenders are retained; the youngest offender goes
    CHECK(removed[0] == 0);
  }
}

TEST_CASE("increment_ages: whole-layer advance") {
  std::vector<NeuronMeta> metas{{0, -1}, {3, 2}};
  increment_ages(metas);
  CHECK(metas[0].age == 1);
  CHECK(metas[1].age == 4);
  CHECK(metas[1].label == 2);
}

// ---------------------------------------------------------------------------
// randomized structural properties (also exercised by the acceptance gate)
// ---------------------------------------------------------------------------

TEST_CASE("property: growth fires iff the full conjunction holds") {
  Rng rng(2024);
  GrowthConfig cfg;
  for (int k = 0; k < 10000; ++k) {
    cfg.a_th = rng.uniform(0.0, 0.3);
    cfg.f_th = rng.uniform(0.05, 0.5);
    cfg.p_th = cfg.f_th + rng.uniform(0.01, 0.45);
    cfg.max_neurons = 2 + static_cast<size_t>(rng.next_u64() % 100);
    const double asr = rng.uniform(0.0, 0.3);
    const double f = rng.uniform();
    const size_t live = 2 + static_cast<size_t>(rng.next_u64() % 100);
    const bool expected = asr < cfg.a_th && f < cfg.f_th && live < cfg.max_neurons;
    REQUIRE(should_grow(asr, f, cfg, live) == expected);
  }
}

TEST_CASE("property: prune removes exactly the offender set, survivors bit-unchanged") {
  Rng rng(77);
  for (int trial = 0; trial < 300; ++trial) {
    const size_t n = 2 + static_cast<size_t>(rng.next_u64() % 12);
    auto layer = small_layer(3, n, 1000 + static_cast<uint64_t>(trial));
    GrowthConfig cfg;
    cfg.age_max = 50;
    cfg.p_th = 0.6;
    cfg.f_th = 0.3;

    for (size_t j = 0; j < n; ++j) {
      layer.meta[j].age = static_cast<uint64_t>(rng.next_u64() % 100);
      layer.ff.f[j] = rng.uniform();
      layer.ff.exposure[j] = rng.uniform(0.0, 20.0);
    }

    std::vector<size_t> offenders;
    for (size_t j = 0; j < n; ++j)
      if (layer.meta[j].age > cfg.age_max && layer.ff.f[j] > cfg.p_th) offenders.push_back(j);

    // snapshot per-neuron identity before pruning
    std::vector<std::vector<double>> weights_before(n);
    for (size_t j = 0; j < n; ++j) weights_before[j] = layer.weights.incoming(j);
    const auto meta_before = layer.meta;
    const auto f_before = layer.ff.f;
    const auto exposure_before = layer.ff.exposure;

    const auto removed = prune(layer, cfg);

    // floor respected, removed is a subset of the offenders
    REQUIRE(layer.neurons() >= 2);
    REQUIRE(layer.neurons() == n - removed.size());
    std::set<size_t> offender_set(offenders.begin(), offenders.end());
    for (size_t r : removed) REQUIRE(offender_set.count(r) == 1);
    // every offender is removed unless the floor forced retention
    const size_t removable = n > 2 ? n - 2 : 0;
    REQUIRE(removed.size() == std::min(offenders.size(), removable));

    // survivors keep their state bit-for-bit and their relative order
    std::set<size_t> removed_set(removed.begin(), removed.end());
    size_t out = 0;
    for (size_t j = 0; j < n; ++j) {
      if (removed_set.count(j)) continue;
      REQUIRE(layer.weights.incoming(out) == weights_before[j]);
      REQUIRE(layer.meta[out] == meta_before[j]);
      REQUIRE(layer.ff.f[out] == f_before[j]);
      REQUIRE(layer.ff.exposure[out] == exposure_before[j]);
      ++out;
    }
  }
}

TEST_CASE("property: growth leaves every existing neuron bit-unchanged") {
  Rng rng(31);
  for (int trial = 0; trial < 200; ++trial) {
    const size_t n = 2 + static_cast<size_t>(rng.next_u64() % 10);
    auto layer = small_layer(4, n, 500 + static_cast<uint64_t>(trial));
    GrowthConfig cfg;
    cfg.noise_sigma = rng.uniform(0.0, 0.1);
    const size_t bmu = static_cast<size_t>(rng.next_u64() % n);

    std::vector<std::vector<double>> weights_before(n);
    for (size_t j = 0; j < n; ++j) weights_before[j] = layer.weights.incoming(j);

    Rng noise(trial);
    grow_neuron(layer, bmu, cfg, PlasticityConfig{}, LifParams{}, noise);

    REQUIRE(layer.neurons() == n + 1);
    for (size_t j = 0; j < n; ++j) REQUIRE(layer.weights.incoming(j) == weights_before[j]);
    // jittered copy stays inside the weight bounds
    for (double w : layer.weights.incoming(n)) {
      REQUIRE(w >= PlasticityConfig{}.w_min);
      REQUIRE(w <= PlasticityConfig{}.w_max);
    }
  }
}

TEST_CASE("growth config invariants") {
  GrowthConfig cfg;
  cfg.f_th = 0.9;
  cfg.p_th = 0.3;
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
  cfg.f_th = 0.3;
  cfg.p_th = 0.9;
  CHECK_NOTHROW(cfg.validate());
  cfg.init_neurons = 1;
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
}
