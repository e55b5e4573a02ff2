#pragma once

#include <cstdint>
#include <limits>
#include <random>
#include <vector>

namespace camo
{

using Rng = std::mt19937_64;

/// Uniform integer in [0, n) by rejection; stable across standard libraries.
inline std::uint64_t uniform_below(Rng& rng, std::uint64_t n)
{
  const std::uint64_t max = std::numeric_limits<std::uint64_t>::max();
  const std::uint64_t limit = max - max % n;
  std::uint64_t x;
  do
  {
    x = rng();
  } while (x >= limit);
  return x % n;
}

/// Moves a uniform k-subset (without replacement) to the front of items.
template <typename T>
void partial_shuffle(std::vector<T>& items, std::size_t k, Rng& rng)
{
  const std::size_t n = items.size();
  for (std::size_t i = 0; i < k && i + 1 < n; ++i)
  {
    const std::size_t j = i + static_cast<std::size_t>(uniform_below(rng, n - i));
    std::swap(items[i], items[j]);
  }
}

inline std::uint64_t splitmix64(std::uint64_t x)
{
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

/// Sub-seed derived purely from (seed, a, b).
inline std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t a, std::uint64_t b = 0)
{
  return splitmix64(splitmix64(splitmix64(seed) ^ a) ^ (b * 0xD1B54A32D192ED03ULL));
}

}  // namespace camo
