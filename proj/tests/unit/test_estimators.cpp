#include <doctest.h>

#include <cmath>
#include <string>
#include <vector>

#include "../support/generators.hpp"
#include "phi4/errors.hpp"
#include "phi4/estimators.hpp"
#include "phi4/rng.hpp"

using namespace phi4;

namespace {

const TorusGrid grid0 = default_grid(0);

// Mean of |cos|^p over one period by composite Simpson.
double mean_abs_cos_pow(double p) {
  const int n = 200000;
  const double h = two_pi / n;
  double acc = 0.0;
  for (int i = 0; i <= n; ++i) {
    const double w = (i == 0 || i == n) ? 1.0 : (i % 2 ? 4.0 : 2.0);
    acc += w * std::pow(std::abs(std::cos(i * h)), p);
  }
  return acc * h / 3.0 / two_pi;
}

SnapshotSeries single_mode(const Mode& k, double T, int n) {
  SnapshotSeries s;
  s.N = 0;
  const FourierField e = FourierField::real_basis(grid0, k);
  for (int i = 0; i <= n; ++i) {
    const double t = T * i / n;
    const FourierField x = std::exp(-t) * e;
    s.add(t, x, FourierField(grid0), x);
  }
  return s;
}

EstimatorReport fake_report(int N, double x) {
  EstimatorReport r;
  r.N = N;
  r.X_functional = x;
  r.Y_q = 1.0;
  r.holder_seminorm = 2.0 + 0.01 * N;
  return r;
}

}  // namespace

TEST_CASE("exponent constraints") {
  CHECK_NOTHROW(ExponentSet{}.validate());
  ExponentSet e;
  e.eps = 0.02;
  e.gamma = 0.03;
  try {
    e.validate();
    FAIL("expected ConfigError");
  } catch (const ConfigError& err) {
    CHECK(std::string(err.what()) == "2ε < γ violated: ε=0.02, γ=0.03");
  }
  ExponentSet f;
  f.eta = 0.5;
  CHECK_THROWS_AS(f.validate(), ConfigError);
  ExponentSet g;
  g.q = 1.2;
  CHECK_THROWS_WITH_AS(g.validate(), "q ∈ (1,8/7) violated: q=1.2", ConfigError);
  ExponentSet h;
  h.alpha = 0.49;
  h.eta = 0.6;
  CHECK_THROWS_AS(h.validate(), ConfigError);  // 2α + 4γ + ε >= 1
}

TEST_CASE("zero trajectory") {
  SnapshotSeries s;
  for (int i = 0; i < 4; ++i) s.add(0.1 * i, FourierField(grid0), FourierField(grid0), FourierField(grid0));
  CHECK(functional_X(s, {}, 0.3) == 0.0);
  CHECK(functional_Y(s, 0.005) == 0.0);
  CHECK(holder_seminorm(s.t, s.X2, 0.55, 0.02, BesovSpec{0.45, 4.0 / 3.0}) == 0.0);
  SnapshotSeries one;
  one.add(0.0, FourierField(grid0), FourierField(grid0), FourierField(grid0));
  CHECK_THROWS_AS(functional_X(one, {}, 0.1), std::invalid_argument);
}

TEST_CASE("single mode trajectory against closed forms") {
  const Mode k{1, 0, 0};
  const double T = 1.0;
  const int n = 200;
  const SnapshotSeries s = single_mode(k, T, n);
  const ExponentSet ex;
  const double lambda = 0.8;
  const double w1 = pn_weight(k, 0, 1);
  // Re e_k = (2pi)^{-3/2} cos(k.x): ||.||_2^2 = 1/2, ||.||_4^4 = 3/(8 (2pi)^3)
  const double i2 = (1.0 - std::exp(-2 * T)) / 2;
  const double i4 = (1.0 - std::exp(-4 * T)) / 4;
  const double integral = (k.norm_sq() + 1.0) * 0.5 * i2 +
                          lambda * std::pow(w1, 4) * 3.0 / (8.0 * torus_volume) * i4;
  // Hoelder quotient in L^{4/3}: ||c cos||_{4/3} = |c| (2pi)^{-3/2} ((2pi)^3 m)^{3/4}
  const double c43 = std::pow(two_pi, -1.5) * std::pow(torus_volume * mean_abs_cos_pow(4.0 / 3.0), 0.75);
  double hq = 0.0;
  for (int i = 1; i <= n; ++i)
    for (int j = i + 1; j <= n; ++j) {
      const double ti = T * i / n, tj = T * j / n;
      hq = std::max(hq, std::pow(ti, ex.eta) * (std::exp(-ti) - std::exp(-tj)) * c43 /
                            std::pow(tj - ti, ex.gamma));
    }
  const double got = functional_X(s, ex, lambda);
  CHECK(got == doctest::Approx(integral + hq).epsilon(1e-3));
  // The quartic part alone isolates the time quadrature: error is O(h^2).
  const double quartic = std::pow(w1, 4) * 3.0 / (8.0 * torus_volume) * i4;
  const auto quartic_of = [&](int steps) {
    const SnapshotSeries q = single_mode(k, T, steps);
    return functional_X(q, ex, 1.0) - functional_X(q, ex, 0.0);
  };
  const double e_fine = std::abs(quartic_of(200) - quartic);
  const double e_coarse = std::abs(quartic_of(20) - quartic);
  CHECK(e_coarse / e_fine == doctest::Approx(100.0).epsilon(0.05));

  SUBCASE("quartic term is linear in lambda") {
    const double a = functional_X(s, ex, 0.0);
    const double b = functional_X(s, ex, 1.0);
    const double c = functional_X(s, ex, 2.0);
    CHECK((c - a) == doctest::Approx(2.0 * (b - a)).epsilon(1e-12));
    CHECK(a == doctest::Approx((k.norm_sq() + 1.0) * 0.5 * i2 + hq).epsilon(1e-3));
  }
}

TEST_CASE("functional_Y pieces") {
  auto rng = make_engine(21, 0, StreamPurpose::test);
  const FourierField a = phi4::testing::random_field(grid0, rng, -1, 1.0);
  const FourierField b = phi4::testing::random_field(grid0, rng, -1, 1.0);
  SnapshotSeries s;
  s.add(0.0, a, FourierField(grid0), a);
  s.add(0.5, b, FourierField(grid0), b);
  const double only_geq = 0.25 * (besov_norm(a, {1.005, 4.0 / 3.0}) + besov_norm(b, {1.005, 4.0 / 3.0}));
  CHECK(functional_Y(s, 0.005) == doctest::Approx(only_geq).epsilon(1e-14));

  // Fields without the lowest block: ||.||_{B^s} is increasing in s.
  FourierField hi(grid0);
  for (std::size_t i = 0; i < hi.coeffs().size(); ++i) {
    if (hi.mode_at(i).norm_sq() >= 4) hi.coeffs_mut()[i] = a.coeffs()[i];
  }
  CHECK(l2_norm_sq(dyadic_block(hi, -1)) == 0.0);
  SnapshotSeries lt, geq;
  lt.add(0.0, hi, hi, FourierField(grid0));
  lt.add(1.0, hi, hi, FourierField(grid0));
  geq.add(0.0, hi, FourierField(grid0), hi);
  geq.add(1.0, hi, FourierField(grid0), hi);
  CHECK(functional_Y(lt, 0.01) <= functional_Y(lt, 0.005));
  CHECK(functional_Y(geq, 0.01) >= functional_Y(geq, 0.005));
}

TEST_CASE("Hoelder seminorm") {
  auto rng = make_engine(22, 0, StreamPurpose::test);
  const FourierField f = phi4::testing::random_field(grid0, rng, -1, 1.0);
  const std::vector<FourierField> constant(5, f);
  const std::vector<double> t = {0.0, 0.1, 0.2, 0.3, 0.4};
  CHECK(holder_seminorm(t, constant, 0.55, 0.02, LpSpec{4.0 / 3.0}) == 0.0);

  const std::vector<double> t2 = {0.5, 1.0};
  const std::vector<FourierField> two = {FourierField(grid0), f};
  const double expect = std::pow(0.5, 0.55) * besov_norm(f, {0.45, 4.0 / 3.0}) / std::pow(0.5, 0.02);
  CHECK(holder_seminorm(t2, two, 0.55, 0.02, BesovSpec{0.45, 4.0 / 3.0}) ==
        doctest::Approx(expect).epsilon(1e-14));

  // refinement never decreases the maximum
  std::vector<double> tt;
  std::vector<FourierField> ff;
  for (int i = 0; i <= 8; ++i) {
    tt.push_back(0.1 * i);
    ff.push_back(phi4::testing::random_field(grid0, rng, -1, 1.0));
  }
  std::vector<double> tc;
  std::vector<FourierField> fc;
  for (int i = 0; i <= 8; i += 2) {
    tc.push_back(tt[i]);
    fc.push_back(ff[i]);
  }
  CHECK(holder_seminorm(tt, ff, 0.55, 0.02, LpSpec{2.0}) >=
        holder_seminorm(tc, fc, 0.55, 0.02, LpSpec{2.0}));
}

TEST_CASE("sup-in-time quantities of the stochastic objects") {
  ModelParams p;
  p.N = 1;
  p.grid = default_grid(1);
  p.seed = 3;
  const auto c = make_constants(1, p.m0);
  EnhancedState e = init_enhanced(p, c, 0, 0.5);
  OuOperator ou(p.grid, p.dt, p.m0);
  std::vector<EnhancedState> snaps;
  for (int n = 0; n < 4; ++n) {
    advance_enhanced(e, draw_noise(p.grid, p.dt, p.seed, 0, n), ou);
    snaps.push_back(e);
  }
  ExponentSet ex;
  const auto v1 = zs_sups(snaps, ex);
  for (double v : v1) {
    CHECK(std::isfinite(v));
    CHECK(v > 0.0);
  }
  // A larger eps lowers every regularity index; up to the lowest block's
  // factor 2^{|ds|} the norms cannot grow.
  ExponentSet ex2 = ex;
  ex2.eps = 0.05;
  ex2.gamma = 0.11;
  ex2.eta = 0.8;
  const auto v2 = zs_sups(snaps, ex2);
  const double slack = std::exp2(0.05);
  for (std::size_t i = 0; i + 1 < zs_count; ++i) {
    CAPTURE(zs_names[i]);
    CHECK(v2[i] <= v1[i] * slack);
  }

  EnhancedState z = snaps.front();
  for (FourierField* f : {&z.Z, &z.Z1, &z.Z2, &z.Z3, &z.Z02, &z.Z03, &z.Z22, &z.Z23}) {
    *f = FourierField(p.grid);
  }
  z.Z2_blocks.reset();
  EnhancedState z2 = z;
  z2.t += 0.1;
  const std::vector<EnhancedState> zero = {z, z2};
  for (double v : zs_sups(zero, ex)) CHECK(v == 0.0);
}

TEST_CASE("tightness table and red flags") {
  std::vector<EstimatorReport> reports;
  for (int N = 0; N <= 3; ++N) {
    for (int i = 0; i < 30; ++i) reports.push_back(fake_report(N, std::pow(2.0, N) + 0.01 * i));
  }
  const auto table = tightness_report(reports);
  CHECK(table.rows.size() == 4 * report_quantities().size());
  REQUIRE(table.red_flags.size() == 1);
  CHECK(table.red_flags[0] == "X_functional");  // 1 -> 8, strictly increasing
  // holder grows 2.00 -> 2.03: monotone but well below 3x
  const auto again = tightness_report(reports);
  CHECK(again.rows.size() == table.rows.size());
  for (std::size_t i = 0; i < table.rows.size(); ++i) {
    CHECK(again.rows[i].mean == table.rows[i].mean);
    CHECK(again.rows[i].se == table.rows[i].se);
  }
  const auto lax = tightness_report(reports, 10.0);
  CHECK(lax.red_flags.empty());

  std::vector<EstimatorReport> small(reports.begin(), reports.begin() + 45);
  CHECK_THROWS_AS(tightness_report(small), std::invalid_argument);
  std::vector<EstimatorReport> one_n(reports.begin(), reports.begin() + 30);
  CHECK_THROWS_AS(tightness_report(one_n), std::invalid_argument);
}
