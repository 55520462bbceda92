#pragma once

#include <bit>
#include <cstdint>
#include <random>
#include <type_traits>

namespace qcslab {

using Rng = std::mt19937_64;

// splitmix64 finalizer
constexpr std::uint64_t mix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

constexpr std::uint64_t hash_combine(std::uint64_t h, std::uint64_t v) {
  return mix64(h ^ mix64(v));
}

template <class T>
constexpr std::uint64_t seed_word(T v) {
  if constexpr (std::is_floating_point_v<T>) {
    double d = static_cast<double>(v);
    if (d == 0.0) d = 0.0;  // fold -0 onto +0
    return std::bit_cast<std::uint64_t>(d);
  } else {
    return static_cast<std::uint64_t>(v);
  }
}

/// Counter-style seed: a pure function of the master seed and the parts, so a
/// trial's random stream does not depend on which thread runs it or when.
template <class... Parts>
constexpr std::uint64_t derive_seed(std::uint64_t master, Parts... parts) {
  std::uint64_t h = mix64(master);
  ((h = hash_combine(h, seed_word(parts))), ...);
  return h;
}

}  // namespace qcslab
