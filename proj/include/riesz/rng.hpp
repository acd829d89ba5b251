#pragma once

#include <cstdint>
#include <random>

namespace riesz {

// Independent random streams. A stream is identified by (seed, lane, replica);
// different lanes never share state, so path draws and noise draws for the same
// replica are independent.
enum class Lane : std::uint64_t {
  Path = 1,
  PathB = 2,  // independent copy of the process (zeta, cell-law checks)
  Noise = 3,  // white noise / Gaussian multipliers
  Restart = 4,
  Oracle = 5,
  Scaled = 6,  // second population of a scaling comparison
};

struct SeedRecord {
  std::uint64_t seed = 0;
  std::uint64_t lane = static_cast<std::uint64_t>(Lane::Path);
  std::uint64_t replica = 0;

  friend bool operator==(const SeedRecord&, const SeedRecord&) = default;
};

inline SeedRecord seed_for(std::uint64_t seed, Lane lane, std::uint64_t replica) {
  return {seed, static_cast<std::uint64_t>(lane), replica};
}

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

inline std::uint64_t stream_key(const SeedRecord& s) {
  return splitmix64(splitmix64(splitmix64(s.seed) ^ s.lane) ^ s.replica);
}

using Engine = std::mt19937_64;

inline Engine make_engine(const SeedRecord& s) {
  const std::uint64_t k = stream_key(s);
  std::seed_seq seq{static_cast<std::uint32_t>(k), static_cast<std::uint32_t>(k >> 32),
                    static_cast<std::uint32_t>(s.lane), static_cast<std::uint32_t>(s.replica)};
  return Engine(seq);
}

// Uniform on the open interval (0, 1).
inline double open_uniform(Engine& rng) {
  return (static_cast<double>(rng() >> 11) + 0.5) * 0x1.0p-53;
}

inline double standard_normal(Engine& rng) {
  std::normal_distribution<double> n(0.0, 1.0);
  return n(rng);
}

}  // namespace riesz
