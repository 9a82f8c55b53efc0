#include <doctest.h>

#include <cmath>

#include "../support/stats.hpp"
#include "phi4/multipliers.hpp"
#include "phi4/trajectory.hpp"

using namespace phi4;

namespace {

ModelParams params_for(int N, double lambda, std::uint64_t seed) {
  ModelParams p;
  p.N = N;
  p.lambda = lambda;
  p.grid = default_grid(N);
  p.seed = seed;
  return p;
}

}  // namespace

TEST_CASE("trajectory starts with an empty lower part") {
  const ModelParams p = params_for(0, 0.5, 8);
  const auto c = make_constants(0, p.m0);
  TrajectoryOptions opt;
  opt.burn_in_T = 0.2;
  opt.pcn_steps = 20;
  Trajectory tr(p, c, 3, opt);
  CHECK(tr.time() == 0.0);
  CHECK(l2_norm_sq(tr.sqe().Xlt) == 0.0);
  CHECK(l2_norm_sq(tr.enhanced().J) == 0.0);
  const Observables o0 = tr.observe();
  CHECK(o0.split_gap == 0.0);
  CHECK(o0.x2_l2sq == doctest::Approx(o0.xgeq_l2sq).epsilon(1e-15));
  for (int n = 0; n < 5; ++n) tr.step();
  const Observables o = tr.observe();
  CHECK(o.step == 5);
  CHECK(o.t == doctest::Approx(5 * p.dt).epsilon(1e-14));
  CHECK(o.xlt_l2sq > 0.0);
  CHECK(o.split_gap < 1e-10);
}

TEST_CASE("trajectory is reproducible from (seed, stream)") {
  const ModelParams p = params_for(0, 0.5, 9);
  const auto c = make_constants(0, p.m0);
  TrajectoryOptions opt;
  opt.burn_in_T = 0.1;
  opt.pcn_steps = 50;
  Trajectory a(p, c, 4, opt), b(p, c, 4, opt), other(p, c, 5, opt);
  for (int n = 0; n < 3; ++n) {
    a.step();
    b.step();
    other.step();
  }
  const auto ca = a.sqe().Xtilde.coeffs();
  const auto cb = b.sqe().Xtilde.coeffs();
  bool same = true;
  for (std::size_t i = 0; i < ca.size(); ++i) same = same && ca[i] == cb[i];
  CHECK(same);
  CHECK(a.pcn_acceptance() == b.pcn_acceptance());
  CHECK(l2_norm_sq(a.sqe().Xtilde - other.sqe().Xtilde) > 0.0);
}

TEST_CASE("lambda = 0: mean of ||X2(0)||^2 after a short burn-in") {
  // xi and zeta are independent mu0 draws driven by the same noise, so
  // X2(0)_k = psi2(k) e^{-w_k B} (xi_k - zeta_k) and
  // E||X2(0)||^2 = sum_k psi2(k)^2 e^{-2 w_k B} / w_k.
  const ModelParams p = params_for(0, 0.0, 17);
  const auto c = make_constants(0, p.m0);
  TrajectoryOptions opt;
  opt.burn_in_T = 0.1;
  opt.pcn_steps = 0;
  const double B = burn_in_steps(opt.burn_in_T, p.dt) * p.dt;
  const FourierField probe(p.grid);
  double expect = 0.0;
  for (std::size_t i = 0; i < probe.coeffs().size(); ++i) {
    const Mode k = probe.mode_at(i);
    const double w = k.norm_sq() + p.m0 * p.m0;
    const double psi = pn_weight(k, p.N, 2);
    expect += psi * psi * std::exp(-2.0 * w * B) / w;
  }
  phi4::testing::MeanSe acc;
  for (std::uint64_t s = 0; s < 200; ++s) acc.add(Trajectory(p, c, s, opt).observe().x2_l2sq);
  CAPTURE(acc.mean());
  CAPTURE(acc.se());
  CAPTURE(expect);
  CHECK(std::abs(acc.mean() - expect) < 5.0 * acc.se());
}
