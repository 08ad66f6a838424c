#pragma once

#include <array>
#include <cstdint>

namespace mesoperc {

/// Philox4x32-10 block function (Salmon et al., SC'11).
inline std::array<std::uint32_t, 4> philox4x32(std::array<std::uint32_t, 4> ctr, std::array<std::uint32_t, 2> key) {
  constexpr std::uint64_t kM0 = 0xD2511F53, kM1 = 0xCD9E8D57;
  constexpr std::uint32_t kW0 = 0x9E3779B9, kW1 = 0xBB67AE85;
  for (int round = 0; round < 10; ++round) {
    const std::uint64_t p0 = kM0 * ctr[0];
    const std::uint64_t p1 = kM1 * ctr[2];
    ctr = {static_cast<std::uint32_t>(p1 >> 32) ^ ctr[1] ^ key[0], static_cast<std::uint32_t>(p1),
           static_cast<std::uint32_t>(p0 >> 32) ^ ctr[3] ^ key[1], static_cast<std::uint32_t>(p0)};
    key[0] += kW0;
    key[1] += kW1;
  }
  return ctr;
}

/// Uniform 32-bit word for vertex v of trial `trial` under `seed`.
inline std::uint32_t vertex_word(std::uint64_t seed, std::uint64_t trial, int v) {
  const auto uv = static_cast<std::uint32_t>(v);
  const auto out = philox4x32({uv >> 2, 0u, static_cast<std::uint32_t>(trial), static_cast<std::uint32_t>(trial >> 32)},
                              {static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)});
  return out[uv & 3u];
}

/// A vertex is black when its word is below this threshold: floor(p 2^32), clamped.
inline std::uint64_t black_threshold(double p) {
  if (!(p > 0)) return 0;
  if (p >= 1) return std::uint64_t{1} << 32;
  return static_cast<std::uint64_t>(p * 4294967296.0);
}

}  // namespace mesoperc
