#pragma once

// Cutoff profiles, the approximation operators P_N^(1), P_N^(2), the heat
// semigroup e^{t(Lap - m0^2)} and the exponential-Euler Duhamel step.

#include <memory>
#include <vector>

#include "phi4/torus_spectral.hpp"

namespace phi4 {

/// C^infinity step: 1 for t <= 0, 0 for t >= 1, and
/// h(1-t)/(h(1-t)+h(t)) in between with h(x) = exp(-1/x).
double smooth_step_down(double t);

/// 1 on [0,1], 0 on [2,inf), smooth and nonincreasing.
double psi1(double r);
/// 1 on [0,2], linear to 0 on [2,4], 0 on [4,inf).
double psi2(double r);

/// psi^(which)(2^{-N}|k1|) psi^(which)(2^{-N}|k2|) psi^(which)(2^{-N}|k3|).
double pn_weight(const Mode& k, int N, int which);

/// Smallest K that resolves the support of P_N^(which).
int pn_min_K(int N, int which);

/// Per-mode weights of P_N^(which) on the grid's mode cube (cached).
std::shared_ptr<const std::vector<double>> pn_multiplier(const TorusGrid& grid,
                                                         int N, int which);

/// Rejects grids with K < pn_min_K(N, which).
FourierField apply_PN(const FourierField& F, int N, int which);

/// e^{-t(k^2+m0^2)} per mode.
FourierField heat_semigroup(const FourierField& F, double t, double m0);

/// One exponential-Euler step with forcing frozen at the interval start:
/// out = e^{-w dt} state + (1 - e^{-w dt})/w forcing, w = k^2 + m0^2.
FourierField duhamel_step(const FourierField& state, const FourierField& forcing,
                          double dt, double m0);

/// duhamel_step with the per-mode factors tabulated once for (grid, dt, m0).
class DuhamelOperator {
 public:
  DuhamelOperator() = default;
  DuhamelOperator(const TorusGrid& grid, double dt, double m0);

  const TorusGrid& grid() const { return grid_; }
  double dt() const { return dt_; }
  double m0() const { return m0_; }

  /// In place: state <- decay * state + phi * forcing.
  void step(FourierField& state, const FourierField& forcing) const;
  /// In place: state <- decay * state.
  void decay(FourierField& state) const;

  std::span<const double> decay_factors() const { return decay_; }
  std::span<const double> phi_factors() const { return phi_; }

 private:
  TorusGrid grid_;
  double dt_ = 0.0;
  double m0_ = 1.0;
  std::vector<double> decay_;
  std::vector<double> phi_;
};

}  // namespace phi4
