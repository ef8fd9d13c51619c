#pragma once

#include <initializer_list>
#include <random>
#include <span>

#include "wrfm/geometry.hpp"

namespace wrfm::test {

inline AxisBox box(std::initializer_list<double> lo, std::initializer_list<double> hi) {
  return AxisBox::make(std::span<const double>(lo.begin(), lo.size()),
                       std::span<const double>(hi.begin(), hi.size()));
}

inline Vec uniform_point(std::mt19937_64& rng, const AxisBox& b) {
  Vec x{};
  for (int i = 0; i < b.dim; ++i) x[i] = std::uniform_real_distribution<double>(b.lo[i], b.hi[i])(rng);
  return x;
}

}  // namespace wrfm::test
