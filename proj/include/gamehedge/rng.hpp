#pragma once

#include <cstdint>
#include <random>

namespace gamehedge {

// Seeds are derived per stream (one stream per simulated path) so that a
// given path is reproducible regardless of batch size or thread count.

constexpr std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

constexpr std::uint64_t derive_seed(std::uint64_t base, std::uint64_t stream) {
  return splitmix64(base ^ splitmix64(stream));
}

using Engine = std::mt19937_64;

inline Engine make_engine(std::uint64_t base, std::uint64_t stream) {
  return Engine(derive_seed(base, stream));
}

}  // namespace gamehedge
