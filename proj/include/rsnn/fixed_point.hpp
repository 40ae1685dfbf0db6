#pragma once

#include <algorithm>
#include <cstdint>

namespace rsnn {

// Architecturally visible accumulators (feedforward registers, membranes,
// logits) are 12-bit two's complement and saturate.
inline constexpr int kAccBits = 12;
inline constexpr int32_t kAccMin = -(1 << (kAccBits - 1));
inline constexpr int32_t kAccMax = (1 << (kAccBits - 1)) - 1;

constexpr int32_t sat12(int64_t v) noexcept {
  return static_cast<int32_t>(std::clamp<int64_t>(v, kAccMin, kAccMax));
}

constexpr bool in_acc_range(int64_t v) noexcept {
  return v >= kAccMin && v <= kAccMax;
}

// Arithmetic shift (floor division by 2^s); well defined for negatives in C++20.
constexpr int32_t shift_right_arith(int32_t v, int s) noexcept { return v >> s; }

}  // namespace rsnn
