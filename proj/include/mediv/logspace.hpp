#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <span>

namespace mediv {

inline constexpr double kNegInf = -std::numeric_limits<double>::infinity();

// log(sum_i exp(x_i)) with max shift; empty or all -inf input yields -inf.
inline double log_sum_exp(std::span<const double> xs) {
  double shift = kNegInf;
  for (double x : xs) shift = std::max(shift, x);
  if (!(shift > kNegInf)) return kNegInf;
  double sum = 0.0;
  for (double x : xs) sum += std::exp(x - shift);
  return shift + std::log(sum);
}

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// Stream seed for chunk `index` of a run seeded with `seed`. Chunked draws
// depend only on (seed, index), never on the number of worker threads.
inline std::uint64_t chunk_seed(std::uint64_t seed, std::uint64_t index) {
  return splitmix64(splitmix64(seed) ^ splitmix64(0x5851f42d4c957f2dULL + index));
}

}  // namespace mediv
