#pragma once

#include <cstdint>
#include <random>

namespace plumesearch {

using Rng = std::mt19937_64;

// splitmix64 finaliser; decorrelates counter-derived seeds.
inline std::uint64_t mix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

// Deterministic per-episode seed from a master seed and an episode index.
// Independent of scheduling, so sweeps are worker-count invariant.
inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index) {
  return mix64(master ^ mix64(index + 1));
}

}  // namespace plumesearch
