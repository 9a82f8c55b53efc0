#include "phi4/sqe_solver.hpp"

#include <cmath>
#include <memory>
#include <sstream>
#include <stdexcept>

#include "phi4/errors.hpp"
#include "phi4/littlewood_paley.hpp"
#include "phi4/multipliers.hpp"

namespace phi4 {

namespace {

// Cubic nonlinearities of P1-band fields only need the cube |k_i| <= 2^{N+1}
// and a grid with M >= 4K'+1 there; results agree with the full grid on
// every mode P1 keeps.
TorusGrid drift_grid(int N) { return make_simulation_grid(pn_min_K(N, 1)); }

void require_finite(const FourierField& f, const char* what, double t) {
  if (!f.all_finite()) {
    std::ostringstream msg;
    msg << "non-finite " << what << " at t=" << t;
    throw BlowUpError(msg.str(), t);
  }
}

}  // namespace

FourierField sqe_drift(const FourierField& Xtilde, const ModelParams& params,
                       const RenormConstants& consts) {
  const int N = params.N;
  const TorusGrid low = drift_grid(N);
  const FourierField p1 = resample(apply_PN(Xtilde, N, 1), low);
  RealField x = inverse_transform(p1);
  const double c = 3.0 * (consts.C1 - 3.0 * params.lambda * consts.C2);
  for (double& v : x.values_mut()) v = v * v * v - c * v;
  FourierField out = apply_PN(forward_transform(x), N, 1);
  out *= -params.lambda;
  return resample(out, Xtilde.grid());
}

void step_sqe(SqeState& state, const NoiseIncrement& dW, const OuOperator& ou) {
  const FourierField drift = sqe_drift(state.Xtilde, state.params, state.consts);
  ou.duhamel().step(state.Xtilde, drift);
  state.Xtilde += ou.stochastic_term(dW);
  require_finite(state.Xtilde, "X~", state.t + ou.dt());
}

FourierField derive_X2(const FourierField& Xtilde, const EnhancedState& enhanced,
                       const ModelParams& params) {
  FourierField out = apply_PN(Xtilde - enhanced.Z, params.N, 2);
  out += params.lambda * enhanced.Z03;
  return out;
}

namespace {

FourierField pointwise(const FourierField& a, const FourierField& b) {
  return multiply(a, b);
}

// Shared pieces of every coefficient functional at one time.
struct Common {
  int N;
  double lambda;
  FourierField a;  // lambda P1 Z03
  FourierField u;  // w - a
  Common(const FourierField& w, const EnhancedState& e, double lam)
      : N(e.N), lambda(lam), a(lam * apply_PN(e.Z03, e.N, 1)), u(w - a) {}
};

// (Z1 - a) against w^2 and (2 Z1 - a) a against w; Phi1 takes the <= parts,
// Phi3 the > parts.
struct PhiOneThree {
  BonyParts sq;
  BonyParts lin;
};

PhiOneThree phi13_parts(const Common& c, const FourierField& w, const EnhancedState& e) {
  const FourierField w2 = pointwise(w, w);
  const FourierField z1a = e.Z1 - c.a;
  const FourierField coef = pointwise(2.0 * e.Z1 - c.a, c.a);
  return {bony_parts(z1a, w2), bony_parts(coef, w)};
}

// The second terms carry 3 lambda [(2 Z1 - a) P1 Z03] = 3 [(2 Z1 - a) a].
FourierField phi1_from(const PhiOneThree& p) {
  FourierField out = -3.0 * (p.sq.lt + p.sq.res);
  out += 3.0 * (p.lin.lt + p.lin.res);
  return out;
}

FourierField phi3_from(const PhiOneThree& p) {
  FourierField out = -3.0 * p.sq.gt;
  out += 3.0 * p.lin.gt;
  return out;
}

FourierField phi2_from(const Common& c, const EnhancedState& e,
                       const FourierField& J0snapshot, const BlockDecomposition& dz2,
                       const BlockDecomposition& du) {
  if (!e.resonances_current) {
    throw std::logic_error("coefficient functionals need current resonances");
  }
  // -3 u > Z2 = -3 Z2 < u
  FourierField out = -3.0 * para_lt(dz2, du);
  out += (3.0 * c.lambda) * e.Z23;
  const FourierField hist = heat_semigroup(J0snapshot, e.t, e.m0);
  const FourierField bracket = e.Z22 - resonance(dz2, BlockDecomposition(hist));
  out += (9.0 * c.lambda) * pointwise(c.u, bracket);
  const FourierField a2 = pointwise(c.a, c.a);
  out -= pointwise(3.0 * e.Z1 - c.a, a2);
  return out;
}

FourierField psi1_from(const FourierField& A_psi, const FourierField& u_lt_J) {
  return A_psi - u_lt_J;
}

FourierField psi2_from(const Common& c, const FourierField& u_lt_J,
                       const BlockDecomposition& dJ, const BlockDecomposition& dz2) {
  FourierField out = resonance(BlockDecomposition(u_lt_J), dz2);
  out -= pointwise(c.u, resonance(dJ, dz2));
  return out;
}

}  // namespace

FourierField coeff_Phi1(const FourierField& w, const EnhancedState& e, double lambda) {
  const Common c(w, e, lambda);
  return phi1_from(phi13_parts(c, w, e));
}

FourierField coeff_Phi3(const FourierField& w, const EnhancedState& e, double lambda) {
  const Common c(w, e, lambda);
  return phi3_from(phi13_parts(c, w, e));
}

FourierField coeff_Phi2(const FourierField& w, const EnhancedState& e, double lambda,
                        const FourierField& J0snapshot) {
  const Common c(w, e, lambda);
  return phi2_from(c, e, J0snapshot, BlockDecomposition(e.Z2), BlockDecomposition(c.u));
}

FourierField coeff_Psi1(const FourierField& w, const EnhancedState& e, double lambda,
                        const FourierField& A_psi) {
  const Common c(w, e, lambda);
  return psi1_from(A_psi, para_lt(c.u, e.J));
}

FourierField coeff_Psi2(const FourierField& w, const EnhancedState& e, double lambda) {
  const Common c(w, e, lambda);
  const BlockDecomposition dJ(e.J);
  return psi2_from(c, para_lt(BlockDecomposition(c.u), dJ), dJ, BlockDecomposition(e.Z2));
}

DecomposedRhs decomposed_rhs(const SqeState& s, const EnhancedState& e, unsigned terms) {
  if (std::abs(s.t - e.t) > 1e-9 * (1.0 + std::abs(s.t))) {
    throw std::invalid_argument("decomposed_rhs: state and enhancement times differ");
  }
  const int N = s.params.N;
  const double lam = s.params.lambda;
  const FourierField p1geq = apply_PN(s.Xgeq, N, 1);
  const FourierField w = apply_PN(s.Xlt, N, 1) + p1geq;
  const Common c(w, e, lam);
  const std::shared_ptr<const BlockDecomposition> z2_blocks =
      e.Z2_blocks ? e.Z2_blocks : std::make_shared<const BlockDecomposition>(e.Z2);
  const BlockDecomposition& dz2 = *z2_blocks;
  const BlockDecomposition du(c.u);
  const BlockDecomposition dJ(e.J);

  const FourierField u_lt_z2 = para_lt(du, dz2);
  DecomposedRhs r;
  r.Xlt = apply_PN(u_lt_z2, N, 1);
  r.A_psi = apply_PN(r.Xlt, N, 1);
  r.Xlt *= -3.0 * lam;

  FourierField g(e.Z.grid());
  if (terms & geq_cubic) {
    const FourierField w3 = pointwise(pointwise(w, w), w);
    g -= lam * w3;
  }
  if (terms & (geq_phi1 | geq_phi3)) {
    const PhiOneThree p = phi13_parts(c, w, e);
    if (terms & geq_phi1) g += lam * phi1_from(p);
    if (terms & geq_phi3) g += lam * phi3_from(p);
  }
  if (terms & geq_phi2) g += lam * phi2_from(c, e, s.J0snapshot, dz2, du);
  if (terms & geq_resonance) {
    g -= (3.0 * lam) * resonance(BlockDecomposition(p1geq), dz2);
  }
  if (terms & (geq_psi1 | geq_psi2)) {
    const FourierField u_lt_J = para_lt(du, dJ);
    if (terms & geq_psi1) {
      const FourierField psi1 = psi1_from(s.A_psi, u_lt_J);
      g += (9.0 * lam * lam) * resonance(BlockDecomposition(psi1), dz2);
    }
    if (terms & geq_psi2) g += (9.0 * lam * lam) * psi2_from(c, u_lt_J, dJ, dz2);
  }
  r.Xgeq = apply_PN(g, N, 1);
  return r;
}

void step_decomposed(SqeState& s, const EnhancedState& e, const DuhamelOperator& op,
                     unsigned terms) {
  const DecomposedRhs r = decomposed_rhs(s, e, terms);
  op.step(s.Xlt, r.Xlt);
  op.step(s.Xgeq, r.Xgeq);
  op.step(s.A_psi, r.A_psi);
  require_finite(s.Xgeq, "Xgeq", s.t + op.dt());
  require_finite(s.Xlt, "Xlt", s.t + op.dt());
}

SqeState init_sqe(const ModelParams& params, const RenormConstants& consts,
                  const FourierField& Xtilde0, const EnhancedState& e, bool decomposed) {
  SqeState s;
  s.t = e.t;
  s.params = params;
  s.consts = consts;
  s.Xtilde = Xtilde0;
  s.decomposed = decomposed;
  s.Xlt = FourierField(params.grid);
  s.Xgeq = derive_X2(Xtilde0, e, params);
  s.A_psi = FourierField(params.grid);
  s.J0snapshot = e.J0;
  return s;
}

void advance(SqeState& s, EnhancedState& e, const NoiseIncrement& dW, const OuOperator& ou,
             unsigned terms) {
  if (s.decomposed) step_decomposed(s, e, ou.duhamel(), terms);
  step_sqe(s, dW, ou);
  advance_enhanced(e, dW, ou, s.decomposed);
  s.t = e.t;
}

}  // namespace phi4
