#include "doctest.h"

#include <stdexcept>

#include <cmath>

#include "dsnn/encoding.hpp"

using namespace dsnn;

TEST_CASE("fit_scaling: single row flags every column constant") {
  const auto stats = fit_scaling({{3.0, 5.0}});
  CHECK(stats.min == std::vector<double>{3.0, 5.0});
  CHECK(stats.max == std::vector<double>{3.0, 5.0});
  CHECK(stats.is_constant(0));
  CHECK(stats.is_constant(1));
}

TEST_CASE("fit_scaling: column-wise min and max") {
  const auto stats = fit_scaling({{0.0, 10.0}, {4.0, 30.0}});
  CHECK(stats.min == std::vector<double>{0.0, 10.0});
  CHECK(stats.max == std::vector<double>{4.0, 30.0});
  CHECK_FALSE(stats.is_constant(0));
}

TEST_CASE("fit_scaling: empty input rejected") {
  CHECK_THROWS_AS(fit_scaling({}), std::invalid_argument);
}

TEST_CASE("fit_scaling: re-fit on scaled output is the identity map") {
  // oracle: scaling uniform data and fitting again must give min ~0, max ~1
  Rng rng(7);
  std::vector<std::vector<double>> rows(1000, std::vector<double>(3));
  for (auto& row : rows) {
    row[0] = rng.uniform(-5.0, 9.0);
    row[1] = rng.uniform(100.0, 220.0);
    row[2] = rng.uniform(0.0, 1.0);
  }
  const auto stats = fit_scaling(rows);
  std::vector<std::vector<double>> scaled;
  for (const auto& row : rows) scaled.push_back(normalize(row, stats));
  const auto refit = fit_scaling(scaled);
  for (size_t c = 0; c < 3; ++c) {
    CHECK(refit.min[c] == doctest::Approx(0.0).epsilon(0.02));
    CHECK(refit.max[c] == doctest::Approx(1.0).epsilon(0.02));
  }
}

TEST_CASE("scaling stats survive the JSON sidecar round trip") {
  const auto stats = fit_scaling({{0.0, 10.0, -3.5}, {4.0, 30.0, 2.25}});
  const auto back = ScalingStats::from_json(stats.to_json());
  CHECK(back.min == stats.min);
  CHECK(back.max == stats.max);
  CHECK(back.retained == stats.retained);
}

TEST_CASE("normalize: endpoints, midpoint, clamp, constants") {
  ScalingStats stats;
  stats.min = {5.0, 0.0, 2.0};
  stats.max = {9.0, 10.0, 2.0};
  stats.retained = {0, 1, 2};

  CHECK(normalize({5.0, 0.0, 2.0}, stats) == FeatureVector{0.0, 0.0, 0.0});
  CHECK(normalize({9.0, 10.0, 2.0}, stats) == FeatureVector{1.0, 1.0, 0.0});
  CHECK(normalize({7.0, 12.0, 99.0}, stats) == FeatureVector{0.5, 1.0, 0.0});
  CHECK_THROWS_AS(normalize({1.0}, stats), std::invalid_argument);
}

TEST_CASE("encode_poisson: all-zero vector never spikes") {
  Rng rng(1);
  const auto train = encode_poisson(FeatureVector(8, 0.0), EncoderConfig{}, rng);
  CHECK(train.total_spikes() == 0);
}

TEST_CASE("encode_poisson: same seed, same train") {
  const FeatureVector x = {0.2, 0.9, 0.5};
  Rng a(42), b(42);
  CHECK(encode_poisson(x, EncoderConfig{}, a) == encode_poisson(x, EncoderConfig{}, b));
}

TEST_CASE("encode_poisson: invalid rate-step product rejected") {
  EncoderConfig cfg;
  cfg.max_rate_hz = 2000.0;  // p = 2 per step
  Rng rng(3);
  CHECK_THROWS_AS(encode_poisson({0.5}, cfg, rng), std::invalid_argument);
}

TEST_CASE("encode_poisson: binomial mean oracle at feature = 1") {
  // p = 63.75 Hz * 1 ms = 0.06375, duration 200 -> mean count 12.75;
  // aggregate sigma over 10000 trials = sqrt(200 p (1-p)) / 100
  const EncoderConfig cfg;
  const double p = cfg.peak_probability();
  const double expected = p * cfg.duration;
  const double sigma_trial = std::sqrt(cfg.duration * p * (1.0 - p));
  const double sigma_mean = sigma_trial / 100.0;

  const int trials = 10000;
  double total = 0.0;
  for (int k = 0; k < trials; ++k) {
    Rng rng(1000 + static_cast<uint64_t>(k));
    total += static_cast<double>(encode_poisson({1.0}, cfg, rng).total_spikes());
  }
  const double mean = total / trials;
  CHECK(std::abs(mean - expected) <= 3.0 * sigma_mean);
}

TEST_CASE("encode_poisson: per-channel empirical rate matches features within 3 sigma") {
  const EncoderConfig cfg;
  const FeatureVector x = {0.05, 0.3, 0.8};
  const int trials = 2000;
  std::vector<double> counts(x.size(), 0.0);
  for (int k = 0; k < trials; ++k) {
    Rng rng(77 + static_cast<uint64_t>(k));
    const auto per = encode_poisson(x, cfg, rng).counts_per_channel();
    for (size_t c = 0; c < x.size(); ++c) counts[c] += static_cast<double>(per[c]);
  }
  for (size_t c = 0; c < x.size(); ++c) {
    const double p = x[c] * cfg.peak_probability();
    const double n = static_cast<double>(trials) * cfg.duration;
    const double mean = counts[c] / n;
    const double sigma = std::sqrt(p * (1.0 - p) / n);
    CHECK(std::abs(mean - p) <= 3.0 * sigma);
  }
}

TEST_CASE("encode_poisson: doubling a feature never loses a spike (common draws)") {
  const EncoderConfig cfg;
  for (uint64_t seed = 0; seed < 20; ++seed) {
    Rng a(seed), b(seed);
    const auto low = encode_poisson({0.31}, cfg, a);
    const auto high = encode_poisson({0.62}, cfg, b);
    for (int t = 0; t < cfg.duration; ++t) {
      if (low.at(t, 0)) CHECK(high.at(t, 0));
    }
  }
}
