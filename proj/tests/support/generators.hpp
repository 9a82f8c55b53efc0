#pragma once

// Hand-rolled generators for property tests. Every generator is a pure
// function of its engine so failures replay from the printed seed.

#include <cmath>
#include <cstdint>
#include <random>

#include "phi4/torus_spectral.hpp"

namespace phi4::testing {

inline std::mt19937_64 engine(std::uint64_t seed) { return std::mt19937_64(seed); }

/// Real band-limited field with coefficients of size ~ (1+|k|^2)^{-decay/2}
/// on |k_i| <= band (band <= grid.K).
inline FourierField random_field(const TorusGrid& grid, std::mt19937_64& rng,
                                 int band = -1, double decay = 0.0) {
  if (band < 0) band = grid.K;
  std::normal_distribution<double> g(0.0, 1.0);
  FourierField f(grid);
  for (int k1 = -band; k1 <= band; ++k1)
    for (int k2 = -band; k2 <= band; ++k2)
      for (int k3 = -band; k3 <= band; ++k3) {
        const Mode k{k1, k2, k3};
        // visit each conjugate pair once
        const bool first = k1 > 0 || (k1 == 0 && (k2 > 0 || (k2 == 0 && k3 >= 0)));
        if (!first) continue;
        const double amp = std::pow(1.0 + k.norm_sq(), -decay / 2.0);
        f.set(k, {amp * g(rng), amp * g(rng)});
      }
  return f;
}

inline double rel_l2_diff(const FourierField& a, const FourierField& b) {
  const double d = l2_norm_sq(a - b);
  const double n = std::max(l2_norm_sq(a), l2_norm_sq(b));
  return n == 0.0 ? std::sqrt(d) : std::sqrt(d / n);
}

}  // namespace phi4::testing
