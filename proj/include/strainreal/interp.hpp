#pragma once

#include <algorithm>
#include <array>
#include <cmath>

namespace strainreal {

/// Lagrange weights for N equispaced nodes first, first+1, ... (unit
/// spacing) evaluated at s.
template <int N>
std::array<double, N> lagrange_weights(double s, int first) {
  std::array<double, N> w{};
  for (int k = 0; k < N; ++k) {
    double num = 1.0, den = 1.0;
    for (int m = 0; m < N; ++m) {
      if (m == k) continue;
      num *= s - (first + m);
      den *= static_cast<double>(k - m);
    }
    w[k] = num / den;
  }
  return w;
}

/// Runtime-size variant of lagrange_weights writing n weights to w.
inline void lagrange_weights(double s, int first, int n, double* w) {
  for (int k = 0; k < n; ++k) {
    double num = 1.0, den = 1.0;
    for (int m = 0; m < n; ++m) {
      if (m == k) continue;
      num *= s - (first + m);
      den *= static_cast<double>(k - m);
    }
    w[k] = num / den;
  }
}

/// First node of an N-point stencil around fractional index s, kept inside
/// [lo, hi].
template <int N>
int stencil_start(double s, int lo, int hi) {
  int first = static_cast<int>(std::floor(s)) - (N / 2 - 1);
  return std::clamp(first, lo, std::max(lo, hi - N + 1));
}

}  // namespace strainreal
