#pragma once

#include <array>
#include <cmath>
#include <cstdint>

namespace mfstop {

// Philox4x32-10 counter-based generator. Output is a pure function of
// (key, counter), so any (scenario, particle, step) cell can be generated
// independently of every other cell and of thread scheduling.
namespace philox {

inline void round_once(std::array<std::uint32_t, 4>& ctr,
                       std::array<std::uint32_t, 2>& key) {
  constexpr std::uint64_t kMul0 = 0xD2511F53u;
  constexpr std::uint64_t kMul1 = 0xCD9E8D57u;
  const std::uint64_t p0 = kMul0 * ctr[0];
  const std::uint64_t p1 = kMul1 * ctr[2];
  const std::uint32_t hi0 = static_cast<std::uint32_t>(p0 >> 32);
  const std::uint32_t lo0 = static_cast<std::uint32_t>(p0);
  const std::uint32_t hi1 = static_cast<std::uint32_t>(p1 >> 32);
  const std::uint32_t lo1 = static_cast<std::uint32_t>(p1);
  ctr = {hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0};
  key[0] += 0x9E3779B9u;
  key[1] += 0xBB67AE85u;
}

inline std::array<std::uint32_t, 4> block(std::uint64_t key64,
                                          std::array<std::uint32_t, 4> ctr) {
  std::array<std::uint32_t, 2> key = {static_cast<std::uint32_t>(key64),
                                      static_cast<std::uint32_t>(key64 >> 32)};
  for (int r = 0; r < 10; ++r) round_once(ctr, key);
  return ctr;
}

}  // namespace philox

// Uniform in (0,1), strictly interior.
inline double uniform_from_bits(std::uint32_t hi, std::uint32_t lo) {
  const std::uint64_t bits = (static_cast<std::uint64_t>(hi) << 32) | lo;
  return (static_cast<double>(bits >> 11) + 0.5) * (1.0 / 9007199254740992.0);
}

// Two independent standard normals for a single counter cell (Box-Muller).
inline std::array<double, 2> normal_pair(std::uint64_t seed, std::uint32_t a,
                                         std::uint32_t b, std::uint32_t c,
                                         std::uint32_t d = 0) {
  const auto x = philox::block(seed, {a, b, c, d});
  const double u1 = uniform_from_bits(x[0], x[1]);
  const double u2 = uniform_from_bits(x[2], x[3]);
  const double r = std::sqrt(-2.0 * std::log(u1));
  const double th = 6.283185307179586476925286766559 * u2;
  return {r * std::cos(th), r * std::sin(th)};
}

inline double standard_normal(std::uint64_t seed, std::uint32_t a,
                              std::uint32_t b, std::uint32_t c,
                              std::uint32_t d = 0) {
  return normal_pair(seed, a, b, c, d)[0];
}

// Uniform integer in [0, bound), for deterministic bootstrap resampling.
inline std::uint64_t uniform_index(std::uint64_t seed, std::uint32_t a,
                                   std::uint32_t b, std::uint32_t c,
                                   std::uint64_t bound) {
  const auto x = philox::block(seed, {a, b, c, 0x9E3779B9u});
  const std::uint64_t bits = (static_cast<std::uint64_t>(x[0]) << 32) | x[1];
  return bits % bound;
}

}  // namespace mfstop
