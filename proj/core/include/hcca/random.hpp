#pragma once

#include <cstdint>
#include <random>

namespace hcca {

// The standard engines are bit-exact across platforms but the distributions
// are not, so draws are derived from raw engine output here.

inline std::uint64_t splitmix64(std::uint64_t x)
{
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// Uniform on [0, 1) with 53 bits of resolution.
inline double uniform01(std::mt19937_64& rng)
{
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

// Integer on [0, n) by modulo reduction; n > 0 and small.
inline std::uint64_t uniform_index(std::mt19937_64& rng, std::uint64_t n)
{
  return rng() % n;
}

}  // namespace hcca
