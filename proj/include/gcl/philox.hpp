#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <numbers>

namespace gcl {

// Philox4x32-10 counter-based generator: output depends only on (key, counter).
class Philox4x32 {
 public:
  using Block = std::array<std::uint32_t, 4>;
  using Key = std::array<std::uint32_t, 2>;

  static Block generate(Block ctr, Key key) {
    for (int round = 0; round < 10; ++round) {
      if (round > 0) {
        key[0] += 0x9E3779B9u;
        key[1] += 0xBB67AE85u;
      }
      const std::uint64_t p0 = std::uint64_t{0xD2511F53u} * ctr[0];
      const std::uint64_t p1 = std::uint64_t{0xCD9E8D57u} * ctr[2];
      ctr = {static_cast<std::uint32_t>(p1 >> 32) ^ ctr[1] ^ key[0], static_cast<std::uint32_t>(p1),
             static_cast<std::uint32_t>(p0 >> 32) ^ ctr[3] ^ key[1], static_cast<std::uint32_t>(p0)};
    }
    return ctr;
  }
};

// Standard normals keyed by (seed, stream index); stream i owns counters (i, j, ·, ·).
class NormalStream {
 public:
  NormalStream(std::uint64_t seed, std::uint64_t index)
      : key_{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)},
        lo_(static_cast<std::uint32_t>(index)),
        hi_(static_cast<std::uint32_t>(index >> 32)) {}

  // Writes n normals; two per generator call via Box–Muller on 53-bit uniforms.
  template <class Out>
  void fill(Out& out, int n) {
    for (int i = 0; i < n; i += 2) {
      const auto r = Philox4x32::generate({lo_, hi_, block_++, 0}, key_);
      const double u1 = uniform(r[0], r[1]), u2 = uniform(r[2], r[3]);
      const double radius = std::sqrt(-2 * std::log(u1));
      const double angle = 2 * std::numbers::pi * u2;
      out[i] = radius * std::cos(angle);
      if (i + 1 < n) out[i + 1] = radius * std::sin(angle);
    }
  }

 private:
  // Uniform on (0, 1).
  static double uniform(std::uint32_t a, std::uint32_t b) {
    const std::uint64_t bits = ((std::uint64_t{a} << 32) | b) >> 11;
    return (static_cast<double>(bits) + 0.5) * 0x1.0p-53;
  }

  Philox4x32::Key key_;
  std::uint32_t lo_, hi_;
  std::uint32_t block_ = 0;
};

}  // namespace gcl
