#include <doctest.h>

#include <cmath>
#include <vector>

#include "../support/generators.hpp"
#include "phi4/errors.hpp"
#include "phi4/littlewood_paley.hpp"
#include "phi4/rng.hpp"
#include "phi4/sqe_solver.hpp"

using namespace phi4;
using phi4::testing::rel_l2_diff;

namespace {

ModelParams params_for(int N, double lambda, double dt) {
  ModelParams p;
  p.N = N;
  p.grid = default_grid(N);
  p.lambda = lambda;
  p.dt = dt;
  p.seed = 7;
  return p;
}

struct Setup {
  ModelParams params;
  RenormConstants consts;
  EnhancedState e;
  SqeState s;
  OuOperator ou;
};

Setup make_setup(int N, double lambda, double dt, bool decomposed = true) {
  Setup u;
  u.params = params_for(N, lambda, dt);
  u.consts = make_constants(N, u.params.m0);
  u.e = init_enhanced(u.params, u.consts, 1, 1.0);
  auto rng = make_engine(u.params.seed, 1, StreamPurpose::initial_x);
  const FourierField x0 = sample_mu0(u.params.grid, u.params.m0, rng);
  u.s = init_sqe(u.params, u.consts, x0, u.e, decomposed);
  u.ou = OuOperator(u.params.grid, dt, u.params.m0);
  return u;
}

double split_gap(const Setup& u) {
  const FourierField x2 = derive_X2(u.s.Xtilde, u.e, u.params);
  return rel_l2_diff(u.s.Xlt + u.s.Xgeq, x2);
}

void run(Setup& u, int steps, unsigned terms = geq_all) {
  for (int n = 0; n < steps; ++n) {
    advance(u.s, u.e, draw_noise(u.params.grid, u.params.dt, u.params.seed, 1, n), u.ou,
            terms);
  }
}

}  // namespace

TEST_CASE("lambda = 0 reduces to the OU process") {
  auto u = make_setup(0, 0.0, 0.05, false);
  u.s.Xtilde = u.e.Z;
  run(u, 5);
  CHECK(rel_l2_diff(u.s.Xtilde, u.e.Z) < 1e-14);
}

TEST_CASE("constant field follows the scalar exponential-Euler map") {
  ModelParams p = params_for(1, 0.7, 0.03);
  p.m0 = 1.3;
  const RenormConstants c = make_constants(1, p.m0);
  SqeState s;
  s.params = p;
  s.consts = c;
  const double x0 = 0.8;
  s.Xtilde = FourierField::constant(p.grid, x0);
  OuOperator ou(p.grid, p.dt, p.m0);
  NoiseIncrement zero{FourierField(p.grid), p.dt, 0, 0};

  double x = x0;
  const double w = p.m0 * p.m0;
  const double cc = 3.0 * (c.C1 - 3.0 * p.lambda * c.C2);
  for (int n = 0; n < 4; ++n) {
    step_sqe(s, zero, ou);
    const double f = -p.lambda * (x * x * x - cc * x);
    x = std::exp(-w * p.dt) * x - std::expm1(-w * p.dt) / w * f;
  }
  const FourierField expect = FourierField::constant(p.grid, x);
  CHECK(std::abs(s.Xtilde({}).real() - expect({}).real()) <=
        1e-12 * std::abs(expect({}).real()));
  CHECK(std::sqrt(l2_norm_sq(s.Xtilde - expect)) <= 1e-12 * std::abs(expect({}).real()));
}

TEST_CASE("drift on the reduced grid matches the full grid") {
  const auto p = params_for(0, 0.5, 0.05);
  const auto c = make_constants(0, p.m0);
  auto rng = make_engine(3, 0, StreamPurpose::test);
  const FourierField x = sample_mu0(p.grid, p.m0, rng);
  const FourierField p1 = apply_PN(x, 0, 1);
  FourierField cube = multiply(multiply(p1, p1), p1);
  cube -= (3.0 * (c.C1 - 3.0 * p.lambda * c.C2)) * p1;
  const FourierField expect = -p.lambda * apply_PN(cube, 0, 1);
  CHECK(rel_l2_diff(sqe_drift(x, p, c), expect) < 1e-13);
}

TEST_CASE("blow-up is reported") {
  auto p = params_for(0, 1e3, 0.5);
  const auto c = make_constants(0, p.m0);
  SqeState s;
  s.params = p;
  s.consts = c;
  s.Xtilde = FourierField::constant(p.grid, 50.0);
  OuOperator ou(p.grid, p.dt, p.m0);
  NoiseIncrement zero{FourierField(p.grid), p.dt, 0, 0};
  bool thrown = false;
  try {
    for (int n = 0; n < 50; ++n) step_sqe(s, zero, ou);
  } catch (const BlowUpError& err) {
    thrown = true;
    CHECK(err.time() > 0.0);
  }
  CHECK(thrown);
}

TEST_CASE("derive_X2") {
  auto u = make_setup(0, 0.4, 0.05);
  const auto& e = u.e;
  CHECK(rel_l2_diff(derive_X2(e.Z, e, u.params), u.params.lambda * e.Z03) < 1e-15);
  auto p0 = u.params;
  p0.lambda = 0.0;
  CHECK(rel_l2_diff(derive_X2(u.s.Xtilde, e, p0), apply_PN(u.s.Xtilde - e.Z, 0, 2)) <
        1e-15);
  EnhancedState e2 = e;
  e2.Z03 = 2.0 * e.Z03;
  const FourierField d = derive_X2(u.s.Xtilde, e2, u.params) - derive_X2(u.s.Xtilde, e, u.params);
  CHECK(rel_l2_diff(d, u.params.lambda * e.Z03) < 1e-12);
}

TEST_CASE("initial split") {
  const auto u = make_setup(0, 0.4, 0.05);
  CHECK(l2_norm_sq(u.s.Xlt) == 0.0);
  CHECK(l2_norm_sq(u.s.A_psi) == 0.0);
  CHECK(split_gap(u) == 0.0);
  CHECK(rel_l2_diff(u.s.J0snapshot, u.e.J0) == 0.0);
  CHECK(l2_norm_sq(u.e.J) == 0.0);
}

TEST_CASE("coefficient functionals: term inspection") {
  auto u = make_setup(0, 0.6, 0.05);
  run(u, 2);
  const auto& e = u.e;
  const double lam = u.params.lambda;
  const FourierField zero(u.params.grid);
  auto rng = make_engine(5, 0, StreamPurpose::test);
  const FourierField w = apply_PN(phi4::testing::random_field(u.params.grid, rng, 4), 0, 1);

  SUBCASE("w = 0") {
    const FourierField a = lam * apply_PN(e.Z03, 0, 1);
    // Phi1 and Phi3 still see a through (2 Z1 - a) a < 0 ... both w-factors vanish
    CHECK(std::sqrt(l2_norm_sq(coeff_Phi1(zero, e, lam))) < 1e-12);
    CHECK(std::sqrt(l2_norm_sq(coeff_Phi3(zero, e, lam))) < 1e-12);
    // Phi2 with w = 0 uses u = -a
    const FourierField hist = heat_semigroup(u.s.J0snapshot, e.t, e.m0);
    FourierField expect = 3.0 * para_lt(e.Z2, a);
    expect += (3.0 * lam) * e.Z23;
    expect -= (9.0 * lam) * multiply(a, e.Z22 - resonance(e.Z2, hist));
    expect -= multiply(3.0 * e.Z1 - a, multiply(a, a));
    CHECK(rel_l2_diff(coeff_Phi2(zero, e, lam, u.s.J0snapshot), expect) < 1e-12);
  }
  SUBCASE("lambda = 0") {
    const BonyParts b = bony_parts(e.Z1, multiply(w, w));
    CHECK(rel_l2_diff(coeff_Phi1(w, e, 0.0), -3.0 * (b.lt + b.res)) < 1e-13);
    CHECK(rel_l2_diff(coeff_Phi3(w, e, 0.0), -3.0 * b.gt) < 1e-13);
  }
  SUBCASE("vanishing stochastic objects") {
    EnhancedState z = e;
    for (FourierField* f : {&z.Z, &z.Z1, &z.Z2, &z.Z3, &z.Z02, &z.Z03, &z.Z22, &z.Z23, &z.J,
                            &z.J0}) {
      *f = FourierField(u.params.grid);
    }
    CHECK(l2_norm_sq(coeff_Phi1(w, z, lam)) == 0.0);
    CHECK(l2_norm_sq(coeff_Phi2(w, z, lam, zero)) == 0.0);
    CHECK(l2_norm_sq(coeff_Phi3(w, z, lam)) == 0.0);
    CHECK(l2_norm_sq(coeff_Psi1(w, z, lam, zero)) == 0.0);
    CHECK(l2_norm_sq(coeff_Psi2(w, z, lam)) == 0.0);
  }
}

TEST_CASE("Psi vanish at t = 0") {
  const auto u = make_setup(0, 0.6, 0.05);
  auto rng = make_engine(6, 0, StreamPurpose::test);
  const FourierField w = apply_PN(phi4::testing::random_field(u.params.grid, rng, 4), 0, 1);
  CHECK(l2_norm_sq(coeff_Psi1(w, u.e, 0.6, u.s.A_psi)) == 0.0);
  CHECK(l2_norm_sq(coeff_Psi2(w, u.e, 0.6)) == 0.0);
}

TEST_CASE("Psi2 for constant w is a low-block resonance") {
  // For constant c, c < g = c (g - Delta_{-1} g - Delta_0 g), so the two
  // terms of Psi2 differ by -c (Delta_{-1} J + Delta_0 J) (=) Z2.
  auto u = make_setup(0, 0.0, 0.05);
  run(u, 3);
  const auto& e = u.e;
  const double c = 0.37;
  const FourierField w = FourierField::constant(u.params.grid, c);
  const FourierField low = dyadic_block(e.J, -1) + dyadic_block(e.J, 0);
  const FourierField expect = -c * resonance(low, e.Z2);
  const FourierField got = coeff_Psi2(w, e, 0.0);
  CHECK(std::sqrt(l2_norm_sq(got - expect)) <= 1e-10);
  CHECK(std::sqrt(l2_norm_sq(expect)) > 1e-6);
}

TEST_CASE("no stochastic objects: cubic heat flow") {
  auto p = params_for(0, 0.8, 0.05);
  const auto c = make_constants(0, p.m0);
  EnhancedState e;
  e.N = 0;
  e.m0 = p.m0;
  e.consts = c;
  for (FourierField* f : {&e.Z, &e.Z1, &e.Z2, &e.Z3, &e.Z02, &e.Z03, &e.Z22, &e.Z23, &e.J,
                          &e.J0}) {
    *f = FourierField(p.grid);
  }
  e.resonances_current = true;
  auto rng = make_engine(8, 0, StreamPurpose::test);
  const FourierField x0 = apply_PN(phi4::testing::random_field(p.grid, rng, 4), 0, 2);
  SqeState s = init_sqe(p, c, x0, e);
  DuhamelOperator op(p.grid, p.dt, p.m0);
  FourierField v = s.Xgeq;
  for (int n = 0; n < 3; ++n) {
    step_decomposed(s, e, op);
    const FourierField pv = apply_PN(v, 0, 1);
    const FourierField f = -p.lambda * apply_PN(multiply(multiply(pv, pv), pv), 0, 1);
    op.step(v, f);
  }
  CHECK(l2_norm_sq(s.Xlt) == 0.0);
  CHECK(rel_l2_diff(s.Xgeq, v) < 1e-13);
}

TEST_CASE("decomposed system reproduces X2") {
  for (int N : {0, 1}) {
    CAPTURE(N);
    auto u = make_setup(N, 0.7, 0.05);
    run(u, N == 0 ? 8 : 3);
    CHECK(split_gap(u) < 1e-10);
    CHECK(u.s.Xlt.is_hermitian(1e-12));
    CHECK(u.s.Xgeq.is_hermitian(1e-12));
    CHECK(std::sqrt(l2_norm_sq(u.s.Xlt)) > 1e-4);
  }
}

TEST_CASE("every Xgeq term is needed for consistency") {
  const std::vector<std::pair<GeqTerm, const char*>> terms = {
      {geq_cubic, "cubic"}, {geq_phi1, "phi1"},     {geq_phi2, "phi2"}, {geq_phi3, "phi3"},
      {geq_resonance, "resonance"}, {geq_psi1, "psi1"}, {geq_psi2, "psi2"}};
  for (const auto& [t, name] : terms) {
    CAPTURE(name);
    auto u = make_setup(0, 0.7, 0.05);
    run(u, 4, geq_all & ~static_cast<unsigned>(t));
    CHECK(split_gap(u) > 1e-6);
  }
}

TEST_CASE("shared-noise runs are bit-reproducible") {
  auto a = make_setup(0, 0.5, 0.05);
  auto b = make_setup(0, 0.5, 0.05);
  run(a, 3);
  run(b, 3);
  CHECK(rel_l2_diff(a.s.Xtilde, b.s.Xtilde) == 0.0);
  CHECK(rel_l2_diff(a.s.Xgeq, b.s.Xgeq) == 0.0);
  CHECK(rel_l2_diff(a.e.Z22, b.e.Z22) == 0.0);
}
