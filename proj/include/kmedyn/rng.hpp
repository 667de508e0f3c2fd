#pragma once

#include <cstdint>
#include <random>

namespace kmedyn {

/// Root seed of a deterministic random stream.
struct RngSeed {
  std::uint64_t value = 42;
};

namespace detail {

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

}  // namespace detail

/// Derive an independent substream. The same (seed, a, b) always maps to the
/// same stream, so batched draws are reproducible regardless of how other
/// streams are consumed.
inline RngSeed substream(RngSeed seed, std::uint64_t a, std::uint64_t b = 0) {
  std::uint64_t s = detail::splitmix64(seed.value);
  s = detail::splitmix64(s ^ detail::splitmix64(a + 0x632be59bd9b4e019ULL));
  s = detail::splitmix64(s ^ detail::splitmix64(b + 0x9e6c63d0876a9a47ULL));
  return RngSeed{s};
}

inline std::mt19937_64 make_rng(RngSeed seed) {
  return std::mt19937_64(detail::splitmix64(seed.value));
}

}  // namespace kmedyn
