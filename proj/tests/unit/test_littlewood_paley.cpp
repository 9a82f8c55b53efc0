#include <doctest.h>

#include <cmath>
#include <stdexcept>

#include "../support/generators.hpp"
#include "phi4/littlewood_paley.hpp"

using namespace phi4;
using phi4::testing::random_field;
using phi4::testing::rel_l2_diff;

namespace {

// Direct spectral-convolution oracle for the three Bony parts, independent of
// the physical-space implementation: e_a e_b = (2pi)^{-3/2} e_{a+b}.
BonyParts naive_bony(const FourierField& f, const FourierField& g) {
  const auto& grid = f.grid();
  const DyadicPartition part = make_partition();
  const int J = part.j_max(grid);
  BonyParts out{FourierField(grid), FourierField(grid), FourierField(grid)};
  const std::size_t n = grid.mode_count();
  for (std::size_t ia = 0; ia < n; ++ia) {
    const Mode a = f.mode_at(ia);
    const double ra = std::sqrt(double(a.norm_sq()));
    for (std::size_t ib = 0; ib < n; ++ib) {
      const Mode b = f.mode_at(ib);
      const Mode c{a.k1 + b.k1, a.k2 + b.k2, a.k3 + b.k3};
      if (!out.lt.contains(c)) continue;
      const double rb = std::sqrt(double(b.norm_sq()));
      const cplx prod = f(a) * g(b) / torus_sqrt_volume;
      double wl = 0, wr = 0, wg = 0;
      for (int i = -1; i <= J; ++i)
        for (int l = -1; l <= J; ++l) {
          const double w = part.weight(i, ra) * part.weight(l, rb);
          if (l - i >= 2) wl += w;
          else if (i - l >= 2) wg += w;
          else wr += w;
        }
      auto add = [&](FourierField& F, double w) {
        F.set_raw(c, F(c) + w * prod);
      };
      add(out.lt, wl);
      add(out.res, wr);
      add(out.gt, wg);
    }
  }
  return out;
}

}  // namespace

TEST_CASE("partition of unity and support separation") {
  const auto part = make_partition();
  const auto grid = make_simulation_grid(32);
  const int J = part.j_max(grid);
  const double rmax = std::sqrt(3.0) * grid.K;
  double worst = 0.0;
  for (int i = 0; i <= 10000; ++i) {
    const double r = rmax * i / 10000.0;
    double s = 0.0;
    for (int j = -1; j <= J; ++j) s += part.weight(j, r);
    worst = std::max(worst, std::abs(s - 1.0));
  }
  CHECK(worst <= 1e-10);

  for (int r2 = 0; r2 <= 3 * grid.K * grid.K; ++r2) {
    const double r = std::sqrt(double(r2));
    for (int j = -1; j <= J; ++j)
      for (int k = j + 2; k <= J; ++k) CHECK(part.weight(j, r) * part.weight(k, r) == 0.0);
  }
  CHECK(part.chi(0.5) == 1.0);
  for (int j = 0; j <= 6; ++j) CHECK(part.weight(j, 0.5) == 0.0);
  CHECK(part.chi(2.0) == 0.0);
  double s2 = 0.0;
  for (int j = 0; j <= 6; ++j) s2 += part.weight(j, 2.0);
  CHECK(s2 == doctest::Approx(1.0).epsilon(1e-15));
  // support of phi inside [3/4, 8/3]
  CHECK(part.phi(0.74) == 0.0);
  CHECK(part.phi(8.0 / 3.0 + 1e-9) == 0.0);
  CHECK(part.chi(4.0 / 3.0) == 0.0);
}

TEST_CASE("telescoping oracle") {
  const auto part = make_partition();
  for (double r : {0.3, 1.1, 2.5, 7.0, 30.0}) {
    for (int J = 0; J < 8; ++J) {
      double s = 0.0;
      for (int j = 0; j <= J; ++j) s += part.phi(std::ldexp(r, -j));
      CHECK(s == doctest::Approx(part.theta(std::ldexp(r, -J - 1)) - part.theta(r))
                     .epsilon(1e-14));
    }
  }
}

TEST_CASE("dyadic blocks") {
  const auto grid = make_simulation_grid(4);
  const auto e0 = FourierField::basis(grid, {});
  CHECK(rel_l2_diff(dyadic_block(e0, -1), e0) == 0.0);
  for (int j = 0; j <= 5; ++j) CHECK(l2_norm_sq(dyadic_block(e0, j)) == 0.0);

  const auto e2 = FourierField::real_basis(grid, {2, 0, 0});
  // |k| = 2 can only meet blocks 0 and 1; phi(1) = 0 leaves block 0 alone.
  for (int j = -1; j <= 6; ++j) {
    if (l2_norm_sq(dyadic_block(e2, j)) > 0.0) CHECK((j == 0 || j == 1));
  }
  CHECK(rel_l2_diff(dyadic_block(e2, 0), e2) == 0.0);

  auto rng = phi4::testing::engine(9);
  const auto f = random_field(grid, rng);
  const int J = make_partition().j_max(grid);
  FourierField sum(grid);
  for (int j = -1; j <= J; ++j) sum += dyadic_block(f, j);
  CHECK(rel_l2_diff(sum, f) < 1e-12);
  for (int j = -1; j <= J; ++j)
    for (int l = j + 2; l <= J; ++l)
      CHECK(std::abs(inner_product(dyadic_block(f, j), dyadic_block(f, l))) < 1e-12);
}

TEST_CASE("besov norm examples and monotonicity up to the low block") {
  const auto grid = make_simulation_grid(4);
  CHECK(besov_norm(FourierField(grid), {0.5, 2.0}) == 0.0);
  for (double s : {-1.0, 0.0, 0.7}) {
    CHECK(besov_norm(FourierField::basis(grid, {}), {s, 2.0}) ==
          doctest::Approx(std::exp2(-s)).epsilon(1e-13));
  }
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    auto rng = phi4::testing::engine(300 + seed);
    const auto f = random_field(grid, rng, -1, 1.0);
    for (double p : {4.0 / 3.0, 2.0, 4.0, double(INFINITY)}) {
      const double s = -0.6, t = 0.4;
      const double a = besov_norm(f, {s, p});
      const double b = besov_norm(f, {t, p});
      CHECK(a <= std::exp2(t - s) * b * (1 + 1e-14));
      const double a1 = besov_norm(f, {s, p, 1.0});
      CHECK(a <= a1 * (1 + 1e-14));  // l^inf <= l^1
    }
  }
}

TEST_CASE("paraproducts match the direct convolution oracle") {
  const auto grid = make_grid(3, 13);
  auto rng = phi4::testing::engine(77);
  const auto f = random_field(grid, rng);
  const auto g = random_field(grid, rng);
  const auto fast = bony_parts(f, g);
  const auto slow = naive_bony(f, g);
  CHECK(rel_l2_diff(fast.lt, slow.lt) < 1e-12);
  CHECK(rel_l2_diff(fast.res, slow.res) < 1e-12);
  CHECK(rel_l2_diff(fast.gt, slow.gt) < 1e-12);
  const auto ser = bony_parts(f, g, kernels::Exec::serial);
  CHECK(rel_l2_diff(ser.lt, fast.lt) == 0.0);
  CHECK(rel_l2_diff(ser.res, fast.res) == 0.0);
}

TEST_CASE("Bony identity and the derived parts") {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    auto rng = phi4::testing::engine(500 + seed);
    const auto grid = make_simulation_grid(4 + int(seed % 3) * 2);
    const auto f = random_field(grid, rng);
    const auto g = random_field(grid, rng);
    const auto p = bony_parts(f, g);
    const auto fg = multiply(f, g);
    CHECK(rel_l2_diff(p.lt + p.res + p.gt, fg) <= 1e-10);
    CHECK(rel_l2_diff(para_gt(f, g), para_lt(g, f)) == 0.0);
    CHECK(rel_l2_diff(para_leq(f, g), p.lt + p.res) < 1e-15);
    CHECK(rel_l2_diff(para_geq(f, g), p.gt + p.res) < 1e-15);
    CHECK(p.lt.is_hermitian(1e-12));
  }
}

TEST_CASE("paraproduct examples and errors") {
  const auto grid = make_simulation_grid(4);
  const auto e0 = FourierField::basis(grid, {});
  const auto p = bony_parts(e0, e0);
  CHECK(l2_norm_sq(p.lt) == 0.0);
  CHECK(l2_norm_sq(p.gt) == 0.0);
  CHECK(std::abs(p.res({}) - 1.0 / torus_sqrt_volume) < 1e-15);

  auto rng = phi4::testing::engine(1);
  const auto f = random_field(grid, rng);
  const auto z = bony_parts(f, FourierField(grid));
  CHECK(l2_norm_sq(z.lt) + l2_norm_sq(z.res) + l2_norm_sq(z.gt) == 0.0);

  CHECK_THROWS_AS(para_lt(FourierField(make_grid(4, 12)), FourierField(make_grid(4, 12))),
                  std::invalid_argument);
  CHECK_THROWS_AS(para_lt(f, FourierField(make_simulation_grid(5))), std::invalid_argument);
}
