#pragma once

// Exponential-Euler integration of the cutoff stochastic quantization equation
// for X~, the remainder X2 = P2(X~ - Z) + lambda Z03, and the coupled system
// for its split X2 = Xlt + Xgeq.

#include <cstdint>

#include "phi4/ou_enhancement.hpp"
#include "phi4/renormalization.hpp"

namespace phi4 {

struct SqeState {
  double t = 0.0;
  FourierField Xtilde;
  FourierField Xlt;
  FourierField Xgeq;
  /// int_0^t e^{(t-s)A} P1^2 [(w_s - lambda P1 Z03_s) < Z2_s] ds
  FourierField A_psi;
  FourierField J0snapshot;
  ModelParams params;
  RenormConstants consts;
  bool decomposed = true;
};

/// -lambda P1 [ (P1 X)^3 - 3 (C1 - 3 lambda C2) P1 X ]
FourierField sqe_drift(const FourierField& Xtilde, const ModelParams& params,
                       const RenormConstants& consts);

/// X~ <- e^{-w dt} X~ + phi(dt) drift(X~) + (the OU stochastic term of dW).
/// Throws BlowUpError when the new state is not finite.
void step_sqe(SqeState& state, const NoiseIncrement& dW, const OuOperator& ou);

/// P2 (X~ - Z) + lambda Z03.
FourierField derive_X2(const FourierField& Xtilde, const EnhancedState& enhanced,
                       const ModelParams& params);

/// Terms of the Xgeq right-hand side, in order of appearance.
enum GeqTerm : unsigned {
  geq_cubic = 1u << 0,
  geq_phi1 = 1u << 1,
  geq_phi2 = 1u << 2,
  geq_phi3 = 1u << 3,
  geq_resonance = 1u << 4,
  geq_psi1 = 1u << 5,
  geq_psi2 = 1u << 6,
  geq_all = (1u << 7) - 1,
};

/// Coefficient functionals of the decomposed system at the enhanced state's
/// time. `w` is the argument P1 Xlt + P1 Xgeq.
FourierField coeff_Phi1(const FourierField& w, const EnhancedState& e, double lambda);
FourierField coeff_Phi2(const FourierField& w, const EnhancedState& e, double lambda,
                        const FourierField& J0snapshot);
FourierField coeff_Phi3(const FourierField& w, const EnhancedState& e, double lambda);
FourierField coeff_Psi1(const FourierField& w, const EnhancedState& e, double lambda,
                        const FourierField& A_psi);
FourierField coeff_Psi2(const FourierField& w, const EnhancedState& e, double lambda);

struct DecomposedRhs {
  FourierField Xlt;    // forcing of Xlt
  FourierField Xgeq;   // forcing of Xgeq
  FourierField A_psi;  // forcing of the Psi1 history integral
};

DecomposedRhs decomposed_rhs(const SqeState& state, const EnhancedState& e,
                             unsigned terms = geq_all);

/// One exponential-Euler step of (Xlt, Xgeq, A_psi) with forcings frozen at
/// the current time.
void step_decomposed(SqeState& state, const EnhancedState& e, const DuhamelOperator& op,
                     unsigned terms = geq_all);

/// Xlt = 0, Xgeq = X2(0), A_psi = 0, J0snapshot = e.J0.
SqeState init_sqe(const ModelParams& params, const RenormConstants& consts,
                  const FourierField& Xtilde0, const EnhancedState& e,
                  bool decomposed = true);

/// One full step of the coupled system from shared noise, in the order
/// decomposed system, X~, then the enhancement. Forcings are all taken at the
/// current time.
void advance(SqeState& state, EnhancedState& e, const NoiseIncrement& dW,
             const OuOperator& ou, unsigned terms = geq_all);

}  // namespace phi4
