#pragma once

// The Ornstein-Uhlenbeck field Z, its Wick powers and the convolved and
// resonant stochastic objects built from it (the "enhancement").

#include <cstdint>
#include <memory>
#include <random>
#include <span>
#include <vector>

#include "phi4/littlewood_paley.hpp"
#include "phi4/multipliers.hpp"
#include "phi4/renormalization.hpp"
#include "phi4/torus_spectral.hpp"

namespace phi4 {

struct NoiseIncrement {
  FourierField dW;  // E|dW(k)|^2 = dt, Hermitian
  double dt = 0.0;
  std::uint64_t stream = 0;
  std::int64_t step = 0;
};

/// Fresh increment from an engine. dt = 0 gives the zero increment.
NoiseIncrement draw_noise(const TorusGrid& grid, double dt, std::mt19937_64& rng);

/// Increment keyed by (seed, stream, step): the same key always yields the
/// same bits. Steps before t = 0 (burn-in) use negative indices.
NoiseIncrement draw_noise(const TorusGrid& grid, double dt, std::uint64_t seed,
                          std::uint64_t stream, std::int64_t step);

/// Combines consecutive fine increments into one coarse increment so that an
/// exact OU step over the coarse interval reproduces the fine-step OU
/// evolution exactly (same stochastic convolution).
NoiseIncrement coarsen_noise(std::span<const NoiseIncrement> fine, double m0);

/// Per-mode factors of the exact OU step for (grid, dt, m0).
class OuOperator {
 public:
  OuOperator() = default;
  OuOperator(const TorusGrid& grid, double dt, double m0);

  const DuhamelOperator& duhamel() const { return duhamel_; }
  double dt() const { return duhamel_.dt(); }
  double m0() const { return duhamel_.m0(); }

  /// sigma_k xi_k with xi = dW / sqrt(dt), sigma^2 = (1 - e^{-2 w dt})/(2w).
  FourierField stochastic_term(const NoiseIncrement& dW) const;
  /// z <- e^{-w dt} z + sigma xi
  void step(FourierField& Z, const NoiseIncrement& dW) const;

 private:
  DuhamelOperator duhamel_;
  std::vector<double> sigma_over_sqrt_dt_;
};

FourierField ou_stochastic_term(const NoiseIncrement& dW, double m0);
FourierField step_Z(const FourierField& Z, const NoiseIncrement& dW, double m0);

struct WickPowers {
  FourierField Z1;  // P1 Z
  FourierField Z2;  // Z1^2 - C1
  FourierField Z3;  // Z1^3 - 3 C1 Z1
};

WickPowers wick_powers(const FourierField& Z, int N, double C1);

struct EnhancedState {
  double t = 0.0;
  int N = 0;
  double m0 = 1.0;
  RenormConstants consts;
  FourierField Z, Z1, Z2, Z3;
  FourierField Z02, Z03;
  FourierField Z22, Z23;
  /// int_0^t e^{(t-s)A} P1^2 Z2_s ds (restarted at t = 0).
  FourierField J;
  /// Value of the same integral over (-burn_in, 0], frozen at t = 0.
  FourierField J0;
  bool resonances_current = false;
  /// Block decomposition of Z2 built by resonance_objects; dropped whenever
  /// Z2 is refreshed.
  std::shared_ptr<const BlockDecomposition> Z2_blocks;
};

/// Advances Z02, Z03 and J over one step with forcings P1 Z2, P1 Z3, P1^2 Z2
/// frozen at the current time.
void step_convolved(EnhancedState& s, const DuhamelOperator& op);

/// Z22 = Z2 (=) P1 Z02 - C2 and Z23 = Z2 (=) P1 Z03 - 3 C2 Z1.
void resonance_objects(EnhancedState& s);

/// Exact OU step of Z from the shared increment, then the convolved objects,
/// Wick powers and (optionally) resonances at the new time.
void advance_enhanced(EnhancedState& s, const NoiseIncrement& dW, const OuOperator& ou,
                      bool with_resonances = true);

/// Z ~ mu0 at t = -burn_in_T with zero history, evolved to t = 0 with the
/// keyed noise of (params.seed, stream, negative steps); J then restarts.
EnhancedState init_enhanced(const ModelParams& params, const RenormConstants& consts,
                            std::uint64_t stream, double burn_in_T);

/// State at t = -burn_in with Z ~ mu0 drawn from (seed, stream), zero history.
EnhancedState fresh_enhanced(const ModelParams& params, const RenormConstants& consts,
                             std::uint64_t stream, double t0);

/// Moves the accumulated J into J0, restarts J at zero and sets t = 0.
void start_observation(EnhancedState& s);

/// Number of steps of size dt covering burn_in_T (rounded to nearest).
std::int64_t burn_in_steps(double burn_in_T, double dt);

}  // namespace phi4
