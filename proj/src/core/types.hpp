// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <functional>

namespace fdtopk {

using PeerId = std::uint32_t;
inline constexpr PeerId kNoPeer = 0xffffffffu;

// Simulated time in milliseconds.
using SimTime = double;

// Query identifier: unique peer id plus a counter managed by the originator.
struct Qid {
  PeerId originator = kNoPeer;
  std::uint32_t counter = 0;

  friend bool operator==(const Qid&, const Qid&) = default;
};

// splitmix64; used to derive independent deterministic streams from a seed.
inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ull;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
  return x ^ (x >> 31);
}

inline std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t a,
                              std::uint64_t b = 0, std::uint64_t c = 0) {
  std::uint64_t h = splitmix64(seed ^ 0x5851f42d4c957f2dull);
  h = splitmix64(h ^ splitmix64(a));
  h = splitmix64(h ^ splitmix64(b + 0x9e3779b97f4a7c15ull));
  h = splitmix64(h ^ splitmix64(c + 0x7f4a7c15ull));
  return h;
}

}  // namespace fdtopk
