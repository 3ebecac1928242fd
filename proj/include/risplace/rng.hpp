// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>

namespace risplace {

// Stream labels. A stream is addressed by (root seed, label, indices...), so
// every draw is independent of evaluation order and thread count.
enum class Stream : std::uint64_t {
  Users = 1,
  Candidates = 2,
  DirectLink = 3,
  BsRisLink = 4,
  RisUserLink = 5,
  Instantiation = 6,
  Level = 7,
  RandomSite = 8,
  Metrics = 9,
  Sweep = 10,
};

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

inline std::uint64_t derive_seed(std::uint64_t root, Stream label,
                                 std::initializer_list<std::uint64_t> indices = {}) {
  std::uint64_t h = splitmix64(root ^ splitmix64(static_cast<std::uint64_t>(label)));
  for (std::uint64_t i : indices) h = splitmix64(h ^ splitmix64(i + 0x632be59bd9b4e019ULL));
  return h;
}

using Engine = std::mt19937_64;

inline Engine make_engine(std::uint64_t root, Stream label,
                          std::initializer_list<std::uint64_t> indices = {}) {
  return Engine(derive_seed(root, label, indices));
}

}  // namespace risplace
