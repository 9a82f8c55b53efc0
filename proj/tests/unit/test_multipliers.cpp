#include <doctest.h>

#include <cmath>
#include <stdexcept>

#include "../support/generators.hpp"
#include "phi4/multipliers.hpp"

using namespace phi4;
using phi4::testing::random_field;

TEST_CASE("profile examples") {
  CHECK(psi1(0.5) == 1.0);
  CHECK(psi1(1.0) == 1.0);
  CHECK(psi1(3.0) == 0.0);
  CHECK(psi1(2.0) == 0.0);
  CHECK(psi1(1.5) == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(psi2(2.0) == 1.0);
  CHECK(psi2(4.0) == 0.0);
  CHECK(psi2(3.0) == 0.5);
}

TEST_CASE("profiles are nonincreasing and psi2 covers psi1") {
  double prev1 = 2.0, prev2 = 2.0;
  for (int i = 0; i <= 10000; ++i) {
    const double r = 5.0 * i / 10000.0;
    const double a = psi1(r), b = psi2(r);
    CHECK(a - prev1 <= 1e-12);
    CHECK(b - prev2 <= 1e-12);
    CHECK(a >= 0.0);
    CHECK(a <= 1.0);
    if (a > 0.0) CHECK(b == 1.0);
    prev1 = a;
    prev2 = b;
  }
}

TEST_CASE("P_N weights at the documented modes") {
  CHECK(pn_weight({1, 1, 1}, 0, 1) == 1.0);
  CHECK(pn_weight({2, 0, 0}, 0, 1) == 0.0);
  CHECK(pn_weight({3, 0, 0}, 1, 1) == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(pn_weight({6, 0, 0}, 1, 2) == 0.5);
}

TEST_CASE("apply_PN rejects unresolved grids") {
  CHECK_THROWS_AS(apply_PN(FourierField(make_simulation_grid(3)), 1, 1),
                  std::invalid_argument);
  CHECK_THROWS_AS(apply_PN(FourierField(make_simulation_grid(4)), 1, 2),
                  std::invalid_argument);
  CHECK_NOTHROW(apply_PN(FourierField(make_simulation_grid(4)), 1, 1));
}

TEST_CASE("P_N^(2) P_N^(1) = P_N^(1) exactly; self-adjoint; commutes with heat") {
  for (int N = 0; N <= 2; ++N) {
    auto rng = phi4::testing::engine(100 + N);
    const auto g = make_simulation_grid(pn_min_K(N, 2));
    const auto f = random_field(g, rng);
    const auto h = random_field(g, rng);
    const auto p1 = apply_PN(f, N, 1);
    const auto p21 = apply_PN(p1, N, 2);
    for (std::size_t i = 0; i < p1.coeffs().size(); ++i) {
      CHECK(p21.coeffs()[i] == p1.coeffs()[i]);
    }
    CHECK(p1.is_hermitian());
    for (int which : {1, 2}) {
      const cplx l = inner_product(apply_PN(f, N, which), h);
      const cplx r = inner_product(f, apply_PN(h, N, which));
      CHECK(std::abs(l - r) <= 1e-12 * std::abs(l));
      const auto a = heat_semigroup(apply_PN(f, N, which), 0.3, 1.0);
      const auto b = apply_PN(heat_semigroup(f, 0.3, 1.0), N, which);
      CHECK(phi4::testing::rel_l2_diff(a, b) < 1e-12);
    }
    // zero outside support
    for (std::size_t i = 0; i < p1.coeffs().size(); ++i) {
      if (pn_weight(p1.mode_at(i), N, 1) == 0.0) CHECK(p1.coeffs()[i] == cplx{});
    }
  }
}

TEST_CASE("heat semigroup examples") {
  const auto g = make_grid(2, 9);
  auto rng = phi4::testing::engine(5);
  const auto f = random_field(g, rng);
  const auto same = heat_semigroup(f, 0.0, 1.0);
  CHECK(phi4::testing::rel_l2_diff(same, f) == 0.0);
  const auto e = heat_semigroup(FourierField::basis(g, {1, 0, 0}), 1.0, 1.0);
  CHECK(std::abs(e({1, 0, 0}) - std::exp(-2.0)) < 1e-16);
  double prev = l2_norm_sq(f);
  for (double t : {0.1, 0.5, 1.0, 3.0, 10.0}) {
    const double n = l2_norm_sq(heat_semigroup(f, t, 1.0));
    CHECK(n < prev);
    prev = n;
  }
  CHECK_THROWS(heat_semigroup(f, -1.0, 1.0));
}

TEST_CASE("duhamel step") {
  const auto g = make_grid(1, 5);
  // |k|^2 = 1 and m0 = 1 give w = 2.
  const Mode k{1, 0, 0};
  FourierField s(g), f(g);
  s.set(k, {1.0, 0.0});
  f.set(k, {1.0, 0.0});
  const auto out = duhamel_step(s, f, 0.5, 1.0);
  const double oracle = std::exp(-1.0) + (1.0 - std::exp(-1.0)) / 2.0;
  CHECK(out(k).real() == doctest::Approx(oracle).epsilon(1e-15));
  CHECK(oracle == doctest::Approx(0.6839).epsilon(1e-4));

  auto rng = phi4::testing::engine(8);
  const auto x = random_field(g, rng);
  const auto a = duhamel_step(x, FourierField(g), 0.25, 1.3);
  const auto b = heat_semigroup(x, 0.25, 1.3);
  CHECK(phi4::testing::rel_l2_diff(a, b) < 1e-15);

  // Constant forcing held forever reaches forcing / w.
  const auto force = random_field(g, rng);
  DuhamelOperator op(g, 0.5, 1.0);
  FourierField st(g);
  for (int i = 0; i < 200; ++i) op.step(st, force);
  for (std::size_t i = 0; i < st.coeffs().size(); ++i) {
    const double w = st.mode_at(i).norm_sq() + 1.0;
    CHECK(std::abs(st.coeffs()[i] - force.coeffs()[i] / w) < 1e-13);
  }
}
