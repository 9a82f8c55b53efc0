#pragma once

// Renormalization constants C1, C2, the energy U_N, and samplers for the
// Gaussian reference measure mu0 and for mu_N = exp(-U_N) mu0 / A_N.

#include <cstdint>
#include <optional>
#include <random>

#include "phi4/torus_spectral.hpp"

namespace phi4 {

struct ModelParams {
  int N = 0;
  double m0 = 1.0;
  double lambda = 0.1;
  double lambda0 = 1.0;
  double T = 1.0;
  double dt = 0.05;
  std::uint64_t seed = 0;
  TorusGrid grid = make_simulation_grid(4);

  /// Throws std::invalid_argument naming the violated invariant.
  void validate() const;
};

/// Default grid for cutoff N: K = 2^{N+2} (support radius of P_N^(2)).
TorusGrid default_grid(int N);

struct RenormConstants {
  int N = 0;
  double m0 = 1.0;
  double C1 = 0.0;
  double C2 = 0.0;
};

/// (1/(2(2pi)^3)) sum_{|k_i| < 2^{N+1}} psi_N^(1)(k)^2 / (k^2 + m0^2)
double compute_C1(int N, double m0);

/// (1/(2(2pi)^6)) sum_{l1,l2} psi(l1)^2 psi(l2)^2 psi(l1+l2)^2 /
///   ((l1^2+m0^2)(l2^2+m0^2)(l1^2+l2^2+(l1+l2)^2+3m0^2)).
/// Throws BudgetError for N > max_N.
double compute_C2(int N, double m0, int max_N = 5);

/// Expected value of the resonance Z2 (=) P1 Z02 at stationarity when Z02 is
/// advanced by exponential Euler with step dt. Tends to C2 as dt -> 0.
double resonance_mean_discrete(int N, double m0, double dt, int max_N = 5);

/// Number of kernel evaluations the symmetry-reduced C2 sum performs.
double c2_cost_estimate(int N);

RenormConstants make_constants(int N, double m0, int max_N = 5);

/// U_N(phi) = int (lambda/4)(P1 phi)^4 - (3 lambda/2)(C1 - 3 lambda C2)(P1 phi)^2.
double energy_UN(const FourierField& phi, const ModelParams& params,
                 const RenormConstants& consts);

/// Centered Gaussian with E|<phi,e_k>|^2 = 1/(2(k^2+m0^2)) on every mode of
/// the grid; mode 0 is real.
FourierField sample_mu0(const TorusGrid& grid, double m0, std::mt19937_64& rng);

struct PcnResult {
  FourierField sample;
  double acceptance_rate = 0.0;
};

/// pCN Metropolis chain targeting mu_N. The chain runs on the modes that U_N
/// sees (|k_i| <= 2^{N+1}); all other modes are independent of them under
/// mu_N and are drawn exactly from mu0 at the end.
PcnResult metropolis_muN(const ModelParams& params, const RenormConstants& consts,
                         int n_steps, std::mt19937_64& rng, double beta = 0.2,
                         const std::optional<FourierField>& start = std::nullopt);

}  // namespace phi4
