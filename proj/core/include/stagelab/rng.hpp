#pragma once

#include <array>
#include <cstdint>

namespace stagelab {

/// Philox4x32-10 counter-based generator.
///
/// The generator is a pure function of (key, counter): the 64-bit seed forms
/// the key, and the 128-bit counter is laid out as
///   word0 = low 32 bits of the draw index, word1 = high 32 bits,
///   word2 = low 32 bits of the stream id, word3 = high 32 bits.
/// Any draw can therefore be reproduced in isolation, and streams split by id
/// never overlap. The algorithm and constants follow the reference Random123
/// implementation; see docs/rng.md for the normal-variate mapping.
class Philox4x32 {
 public:
  using Block = std::array<std::uint32_t, 4>;

  static constexpr int kVersion = 1;

  explicit Philox4x32(std::uint64_t seed) noexcept;

  [[nodiscard]] Block operator()(std::uint64_t stream, std::uint64_t index) const noexcept;

  [[nodiscard]] static Block bijection(Block counter, std::array<std::uint32_t, 2> key) noexcept;

 private:
  std::array<std::uint32_t, 2> key_;
};

/// Standard normal draws addressed by (stream, index).
///
/// Pair j = index / 2 uses one Philox block: words (0,1) give u1, words (2,3)
/// give u2, each a 53-bit uniform in [0, 1). Box-Muller then yields
///   r = sqrt(-2 ln(1 - u1)), index even -> r cos(2 pi u2), odd -> r sin(2 pi u2).
class NormalStream {
 public:
  NormalStream(std::uint64_t seed, std::uint64_t stream) noexcept : gen_(seed), stream_(stream) {}

  [[nodiscard]] double operator()(std::uint64_t index) const noexcept;

 private:
  Philox4x32 gen_;
  std::uint64_t stream_;
};

/// Maps two 32-bit words to a double in [0, 1) with 53 random bits.
[[nodiscard]] double to_unit_interval(std::uint32_t hi, std::uint32_t lo) noexcept;

}  // namespace stagelab
