#pragma once

#include <array>
#include <cstdint>

namespace multisum {

// Philox4x32-10 counter-based generator (Salmon et al. 2011).
inline std::array<std::uint32_t, 4> philox4x32(std::array<std::uint32_t, 4> ctr,
                                               std::array<std::uint32_t, 2> key) {
  constexpr std::uint32_t kM0 = 0xD2511F53u;
  constexpr std::uint32_t kM1 = 0xCD9E8D57u;
  constexpr std::uint32_t kW0 = 0x9E3779B9u;
  constexpr std::uint32_t kW1 = 0xBB67AE85u;
  for (int round = 0; round < 10; ++round) {
    std::uint64_t p0 = static_cast<std::uint64_t>(kM0) * ctr[0];
    std::uint64_t p1 = static_cast<std::uint64_t>(kM1) * ctr[2];
    auto hi0 = static_cast<std::uint32_t>(p0 >> 32);
    auto lo0 = static_cast<std::uint32_t>(p0);
    auto hi1 = static_cast<std::uint32_t>(p1 >> 32);
    auto lo1 = static_cast<std::uint32_t>(p1);
    ctr = {hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0};
    key[0] += kW0;
    key[1] += kW1;
  }
  return ctr;
}

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

// Purpose of a variate; keeps sums, limits and auxiliary draws disjoint.
enum class Stream : std::uint32_t { axis = 0, limit = 1, aux = 2 };

// Seed plus the counter layout: every variate is addressed by
// (stream, axis, coordinate, replication) and never by draw order.
struct RngSpec {
  std::uint64_t seed = 0;

  RngSpec derive(std::uint64_t tag) const { return {splitmix64(seed ^ splitmix64(tag))}; }

  std::array<std::uint32_t, 4> block(std::uint64_t rep, Stream stream, std::uint32_t axis,
                                     std::uint32_t index) const {
    std::array<std::uint32_t, 4> ctr{index, (static_cast<std::uint32_t>(stream) << 24) | axis,
                                     static_cast<std::uint32_t>(rep),
                                     static_cast<std::uint32_t>(rep >> 32)};
    std::array<std::uint32_t, 2> key{static_cast<std::uint32_t>(seed),
                                     static_cast<std::uint32_t>(seed >> 32)};
    return philox4x32(ctr, key);
  }

  // Two independent uniforms in the open interval (0, 1).
  std::array<double, 2> uniforms(std::uint64_t rep, Stream stream, std::uint32_t axis,
                                 std::uint32_t index) const {
    auto b = block(rep, stream, axis, index);
    auto to_unit = [](std::uint32_t hi, std::uint32_t lo) {
      std::uint64_t bits = ((static_cast<std::uint64_t>(hi) << 32) | lo) >> 11;
      return (static_cast<double>(bits) + 0.5) * 0x1.0p-53;
    };
    return {to_unit(b[0], b[1]), to_unit(b[2], b[3])};
  }
};

}  // namespace multisum
