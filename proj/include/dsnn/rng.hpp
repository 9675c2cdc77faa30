#pragma once

#include <cmath>
#include <cstdint>
#include <string_view>

namespace dsnn {

// Deterministic random source. std:: distributions are implementation
// defined, so uniform/normal/bernoulli are generated by hand on top of
// xoshiro256**: replays have to be bit-exact across builds and platforms.
class Rng {
 public:
  explicit Rng(uint64_t seed) {
    // splitmix64 expansion of the seed into the xoshiro state
    uint64_t x = seed;
    for (auto& s : state_) {
      x += 0x9e3779b97f4a7c15ULL;
      uint64_t z = x;
      z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
      z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
      s = z ^ (z >> 31);
    }
  }

  uint64_t next_u64() {
    const uint64_t result = rotl(state_[1] * 5, 7) * 9;
    const uint64_t t = state_[1] << 17;
    state_[2] ^= state_[0];
    state_[3] ^= state_[1];
    state_[1] ^= state_[2];
    state_[0] ^= state_[3];
    state_[2] ^= t;
    state_[3] = rotl(state_[3], 45);
    return result;
  }

  // uniform double in [0, 1)
  double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  bool bernoulli(double p) { return uniform() < p; }

  // Box-Muller, one sample per call (no cached second value, keeps the
  // draw count predictable for replay tests)
  double normal(double mean, double sigma) {
    const double u1 = 1.0 - uniform();  // (0, 1], keeps log finite
    const double u2 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    return mean + sigma * r * std::cos(2.0 * M_PI * u2);
  }

 private:
  static uint64_t rotl(uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }
  uint64_t state_[4];
};

// Splits a master seed into independent named sub-streams, e.g.
//   SeedTree seeds(master);
//   Rng enc(seeds.derive("encode", sample_index));
// Every artifact of a run is a pure function of the master seed.
class SeedTree {
 public:
  explicit SeedTree(uint64_t master) : master_(master) {}

  uint64_t master() const { return master_; }

  uint64_t derive(std::string_view name) const {
    return mix(master_, fnv1a(name));
  }

  uint64_t derive(std::string_view name, uint64_t index) const {
    return mix(derive(name), 0x5851f42d4c957f2dULL + index);
  }

 private:
  static uint64_t fnv1a(std::string_view s) {
    uint64_t h = 0xcbf29ce484222325ULL;
    for (char c : s) {
      h ^= static_cast<unsigned char>(c);
      h *= 0x100000001b3ULL;
    }
    return h;
  }

  static uint64_t mix(uint64_t a, uint64_t b) {
    uint64_t z = a ^ (b + 0x9e3779b97f4a7c15ULL + (a << 6) + (a >> 2));
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  uint64_t master_;
};

}  // namespace dsnn
