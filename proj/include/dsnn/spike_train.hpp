#pragma once

#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <utility>
#include <vector>

namespace dsnn {

// Binary spike raster, timestep x channel. Dense storage: a cell is either
// spiking or silent, so duplicate (t, c) events cannot be represented.
class SpikeTrain {
 public:
  SpikeTrain(int duration, int channels)
      : duration_(duration),
        channels_(channels),
        grid_(static_cast<size_t>(duration) * static_cast<size_t>(channels), 0) {
    if (duration <= 0 || channels <= 0)
      throw std::invalid_argument("SpikeTrain: duration and channels must be positive");
  }

  int duration() const { return duration_; }
  int channels() const { return channels_; }

  bool at(int t, int c) const { return grid_[index(t, c)] != 0; }
  void set(int t, int c) { grid_[index(t, c)] = 1; }

  const uint8_t* row(int t) const { return grid_.data() + index(t, 0); }
  uint8_t* row(int t) { return grid_.data() + index(t, 0); }

  size_t total_spikes() const {
    size_t n = 0;
    for (uint8_t b : grid_) n += b;
    return n;
  }

  std::vector<size_t> counts_per_channel() const {
    std::vector<size_t> counts(static_cast<size_t>(channels_), 0);
    for (int t = 0; t < duration_; ++t) {
      const uint8_t* r = row(t);
      for (int c = 0; c < channels_; ++c) counts[static_cast<size_t>(c)] += r[c];
    }
    return counts;
  }

  // (timestep, channel) pairs in raster order
  std::vector<std::pair<int, int>> events() const {
    std::vector<std::pair<int, int>> out;
    for (int t = 0; t < duration_; ++t) {
      const uint8_t* r = row(t);
      for (int c = 0; c < channels_; ++c)
        if (r[c]) out.emplace_back(t, c);
    }
    return out;
  }

  bool operator==(const SpikeTrain& other) const = default;

 private:
  size_t index(int t, int c) const {
    return static_cast<size_t>(t) * static_cast<size_t>(channels_) + static_cast<size_t>(c);
  }

  int duration_;
  int channels_;
  std::vector<uint8_t> grid_;
};

}  // namespace dsnn
