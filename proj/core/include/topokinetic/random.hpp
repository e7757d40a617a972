#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace topokinetic {

using Engine = std::mt19937_64;

/// SplitMix64 finalizer; decorrelates nearby seeds.
constexpr std::uint64_t mix_seed(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

/// Engine for stream `index` of a master seed. Independent of scheduling order.
inline Engine stream_engine(std::uint64_t master_seed, std::uint64_t index) {
  return Engine(mix_seed(mix_seed(master_seed) ^ mix_seed(index + 0x632be59bd9b4e019ULL)));
}

/// Uniform on [0,1) with 53 random bits; never returns 1.
inline double uniform01(Engine& engine) {
  return static_cast<double>(engine() >> 11) * 0x1.0p-53;
}

inline double exponential(Engine& engine, double rate) {
  return -std::log1p(-uniform01(engine)) / rate;
}

}  // namespace topokinetic
