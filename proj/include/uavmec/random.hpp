#pragma once

#include <cstdint>
#include <random>

namespace uavmec {

using Rng = std::mt19937_64;

// splitmix64 finalizer; decorrelates seeds that differ in a few bits.
constexpr std::uint64_t mix_seed(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

enum class StreamId : std::uint64_t {
  mobility = 1,
  tasks = 2,
  fading = 3,
  decisions = 4,
};

constexpr std::uint64_t stream_seed(std::uint64_t seed, StreamId id) {
  return mix_seed(mix_seed(seed) ^ mix_seed(static_cast<std::uint64_t>(id) * 0x632be59bd9b4e019ULL));
}

// Independent generators so that changing one model does not shift the
// sample sequence seen by the others.
struct RngStreams {
  Rng mobility;
  Rng tasks;
  Rng fading;
  Rng decisions;

  explicit RngStreams(std::uint64_t seed = 0)
      : mobility(stream_seed(seed, StreamId::mobility)),
        tasks(stream_seed(seed, StreamId::tasks)),
        fading(stream_seed(seed, StreamId::fading)),
        decisions(stream_seed(seed, StreamId::decisions)) {}

  friend bool operator==(const RngStreams&, const RngStreams&) = default;
};

}  // namespace uavmec
