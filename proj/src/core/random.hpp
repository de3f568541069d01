// Copyright 2026 The odct Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#ifndef ODCT_SRC_CORE_RANDOM_HPP_
#define ODCT_SRC_CORE_RANDOM_HPP_

#include <cstdint>
#include <numeric>
#include <random>
#include <vector>

namespace odct::internal {

// The standard distributions are implementation-defined, so index sampling is
// done directly on the engine output to keep results identical everywhere.
inline std::uint64_t UniformIndex(std::mt19937_64& rng, std::uint64_t n) {
  const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
  std::uint64_t x;
  do {
    x = rng();
  } while (x >= limit);
  return x % n;
}

// Uniform in [0, 1) with 53 random bits.
inline double UniformUnit(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

// k distinct indices from [0, n) in draw order (partial Fisher-Yates).
inline std::vector<std::size_t> SampleDistinct(std::mt19937_64& rng,
                                               std::size_t n, std::size_t k) {
  std::vector<std::size_t> pool(n);
  std::iota(pool.begin(), pool.end(), std::size_t{0});
  for (std::size_t i = 0; i < k; ++i) {
    const std::size_t j = i + UniformIndex(rng, n - i);
    std::swap(pool[i], pool[j]);
  }
  pool.resize(k);
  return pool;
}

}  // namespace odct::internal

#endif  // ODCT_SRC_CORE_RANDOM_HPP_
