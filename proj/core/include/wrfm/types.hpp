#pragma once

#include <array>
#include <cstddef>

namespace wrfm {

inline constexpr int kMaxDim = 3;

/// Point or direction in up to three dimensions. Components past the active
/// dimension are ignored and conventionally zero.
using Vec = std::array<double, kMaxDim>;

/// Per-axis derivative orders or test-function frequencies.
using MultiIndex = std::array<int, kMaxDim>;

inline int total_order(const MultiIndex& alpha) { return alpha[0] + alpha[1] + alpha[2]; }

}  // namespace wrfm
