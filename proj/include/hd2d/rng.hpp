#pragma once

#include <cstdint>
#include <random>

namespace hd2d {

using Rng = std::mt19937_64;

namespace detail {
inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}
}  // namespace detail

/// Independent generator for (root seed, iteration index, stream tag). Counter based,
/// so any iteration can be replayed without running the ones before it.
inline Rng substream(std::uint64_t root, std::uint64_t index, std::uint64_t stream = 0) {
  std::uint64_t s = detail::splitmix64(root);
  s = detail::splitmix64(s ^ (index * 0xd1342543de82ef95ULL));
  s = detail::splitmix64(s ^ (stream + 0x632be59bd9b4e019ULL));
  return Rng(s);
}

inline double uniform01(Rng& rng) { return std::uniform_real_distribution<double>(0.0, 1.0)(rng); }

inline double uniform(Rng& rng, double lo, double hi) {
  return lo == hi ? lo : std::uniform_real_distribution<double>(lo, hi)(rng);
}

inline bool bernoulli(Rng& rng, double p) {
  if (p <= 0.0) return false;
  if (p >= 1.0) return true;
  return uniform01(rng) < p;
}

}  // namespace hd2d
