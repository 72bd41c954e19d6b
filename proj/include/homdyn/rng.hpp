#ifndef HOMDYN_RNG_HPP_
#define HOMDYN_RNG_HPP_

#include <cstdint>
#include <random>

namespace homdyn {

using Engine = std::mt19937_64;

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// Engine for trial `index` of a run seeded with `seed`. Streams for
// different indices are decorrelated through two rounds of splitmix.
inline Engine substream(std::uint64_t seed, std::uint64_t index) {
  const std::uint64_t s = splitmix64(splitmix64(seed) ^ splitmix64(index + 0x632be59bd9b4e019ULL));
  std::seed_seq seq{static_cast<std::uint32_t>(s), static_cast<std::uint32_t>(s >> 32),
                    static_cast<std::uint32_t>(index), static_cast<std::uint32_t>(seed)};
  return Engine(seq);
}

// Uniform double in [0, 1) built from the top 53 bits; identical on every
// platform for a given engine state.
inline double uniform01(Engine& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

}  // namespace homdyn

#endif  // HOMDYN_RNG_HPP_
