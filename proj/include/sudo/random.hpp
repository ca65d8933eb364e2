#pragma once

// Portable, seed-positional randomness.
//
// std::mt19937_64 has a fully specified output sequence, but the standard
// distributions do not, so uniform/normal/index draws are implemented here
// to keep every generated dataset and report identical across toolchains.

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <limits>
#include <numeric>
#include <random>
#include <vector>

namespace sudo {

using Engine = std::mt19937_64;

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

// Derives a substream seed from a master seed and a task coordinate.
// Depends only on the values, never on call order.
inline std::uint64_t derive_seed(std::uint64_t master, std::initializer_list<std::uint64_t> path) {
  std::uint64_t h = splitmix64(master);
  for (auto p : path) h = splitmix64(h ^ splitmix64(p + 0x632BE59BD9B4E019ULL));
  return h;
}

inline Engine make_engine(std::uint64_t seed) { return Engine{seed}; }

// Uniform in [0, 1) with 53 random bits.
inline double uniform01(Engine& eng) { return static_cast<double>(eng() >> 11) * 0x1.0p-53; }

// Uniform integer in [0, n), unbiased (rejection on the top partial block).
inline std::size_t uniform_index(Engine& eng, std::size_t n) {
  const std::uint64_t bound = static_cast<std::uint64_t>(n);
  const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() -
                              std::numeric_limits<std::uint64_t>::max() % bound;
  std::uint64_t r;
  do {
    r = eng();
  } while (r >= limit);
  return static_cast<std::size_t>(r % bound);
}

// Box-Muller; one normal per call (the partner draw is discarded so the
// stream position of every variate is fixed).
inline double standard_normal(Engine& eng) {
  double u1;
  do {
    u1 = uniform01(eng);
  } while (u1 <= 0.0);
  const double u2 = uniform01(eng);
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * 3.14159265358979323846 * u2);
}

inline double exponential(Engine& eng, double rate) {
  double u;
  do {
    u = uniform01(eng);
  } while (u <= 0.0);
  return -std::log(u) / rate;
}

// k distinct indices from [0, n) via partial Fisher-Yates, in draw order.
inline std::vector<std::size_t> sample_without_replacement(Engine& eng, std::size_t n,
                                                           std::size_t k) {
  std::vector<std::size_t> pool(n);
  std::iota(pool.begin(), pool.end(), std::size_t{0});
  if (k > n) k = n;
  for (std::size_t i = 0; i < k; ++i) {
    const std::size_t j = i + uniform_index(eng, n - i);
    std::swap(pool[i], pool[j]);
  }
  pool.resize(k);
  return pool;
}

}  // namespace sudo
