#pragma once

#include <cstdint>

// Q47.16 fixed-point arithmetic used by the transaction interpreter.
// All transaction-visible values (state, packet fields, now, weights)
// are carried at this scale so that divisions keep their fractional
// part deterministically.

namespace pifo {

using fx = std::int64_t;

inline constexpr int kFxBits = 16;
inline constexpr fx kFxOne = fx{1} << kFxBits;

constexpr fx to_fx(std::int64_t v) { return v << kFxBits; }

// Floor toward negative infinity.
constexpr std::int64_t fx_floor(fx v) { return v >> kFxBits; }

constexpr std::int64_t fx_ceil(fx v) {
  return (v + (kFxOne - 1)) >> kFxBits;
}

constexpr fx fx_mul(fx a, fx b) {
  return static_cast<fx>((static_cast<__int128>(a) * b) >> kFxBits);
}

// Caller guarantees b != 0.
constexpr fx fx_div(fx a, fx b) {
  return static_cast<fx>((static_cast<__int128>(a) << kFxBits) / b);
}

// Truncate the fractional part in place (still scaled).
constexpr fx fx_trunc(fx v) { return (v >> kFxBits) << kFxBits; }

}  // namespace pifo
