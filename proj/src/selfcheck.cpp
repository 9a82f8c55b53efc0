#include "phi4/selfcheck.hpp"

#include <algorithm>
#include <cmath>

#include "phi4/littlewood_paley.hpp"
#include "phi4/multipliers.hpp"
#include "phi4/renormalization.hpp"
#include "phi4/rng.hpp"

namespace phi4 {

namespace {

FourierField random_real_field(const TorusGrid& grid, std::mt19937_64& rng) {
  std::normal_distribution<double> g(0.0, 1.0);
  FourierField f(grid);
  const int K = grid.K;
  for (int k1 = 0; k1 <= K; ++k1)
    for (int k2 = -K; k2 <= K; ++k2)
      for (int k3 = -K; k3 <= K; ++k3) {
        if (k1 == 0 && (k2 < 0 || (k2 == 0 && k3 < 0))) continue;
        const Mode k{k1, k2, k3};
        const double amp = 1.0 / (1.0 + k.norm_sq());
        f.set(k, {amp * g(rng), amp * g(rng)});
      }
  return f;
}

double rel_diff(const FourierField& a, const FourierField& b) {
  const double n = std::max(l2_norm_sq(a), l2_norm_sq(b));
  const double d = l2_norm_sq(a - b);
  return n > 0.0 ? std::sqrt(d / n) : std::sqrt(d);
}

SelfcheckItem item(std::string name, double value, double tol) {
  return {std::move(name), value, tol, value <= tol};
}

SelfcheckItem partition_of_unity() {
  const TorusGrid g = make_simulation_grid(32);
  const DyadicPartition part = make_partition();
  const int jmax = part.j_max(g);
  const double rmax = std::sqrt(3.0) * g.K;
  const int n = 20000;
  double worst = 0.0;
  for (int i = 0; i <= n; ++i) {
    const double r = rmax * i / n;
    double s = 0.0;
    for (int j = -1; j <= jmax; ++j) s += part.weight(j, r);
    worst = std::max(worst, std::abs(s - 1.0));
  }
  return item("partition_of_unity", worst, 1e-10);
}

SelfcheckItem bony(std::mt19937_64& rng) {
  const TorusGrid g = make_simulation_grid(8);
  double worst = 0.0;
  for (int i = 0; i < 20; ++i) {
    const FourierField f = random_real_field(g, rng);
    const FourierField h = random_real_field(g, rng);
    const BonyParts p = bony_parts(f, h);
    worst = std::max(worst, rel_diff(p.lt + p.res + p.gt, multiply(f, h)));
  }
  return item("bony_decomposition", worst, 1e-10);
}

SelfcheckItem heat() {
  const TorusGrid g = make_simulation_grid(8);
  const double m0 = 1.0;
  double worst = 0.0;
  for (const Mode& k : {Mode{0, 0, 0}, Mode{1, 0, 0}, Mode{2, -3, 1}, Mode{8, 8, 8}, Mode{-5, 0, 7}}) {
    for (double t : {0.0, 0.01, 0.3, 1.0}) {
      const FourierField out = heat_semigroup(FourierField::basis(g, k), t, m0);
      const double expect = std::exp(-(k.norm_sq() + m0 * m0) * t);
      for (std::size_t i = 0; i < out.coeffs().size(); ++i) {
        const bool at_k = out.mode_at(i) == k;
        const double err = at_k ? std::abs(out.coeffs()[i] - cplx{expect, 0.0}) / expect
                                : std::abs(out.coeffs()[i]);
        worst = std::max(worst, err);
      }
    }
  }
  return item("heat_semigroup", worst, 1e-14);
}

SelfcheckItem parseval(std::mt19937_64& rng) {
  double worst = 0.0;
  for (int K : {4, 8, 16}) {
    const TorusGrid g = make_simulation_grid(K);
    const FourierField f = random_real_field(g, rng);
    const double spec = l2_norm_sq(f);
    const double phys = std::pow(lp_norm(inverse_transform(f), 2.0), 2);
    worst = std::max(worst, std::abs(spec - phys) / spec);
  }
  return item("parseval", worst, 1e-10);
}

SelfcheckItem round_trip(std::mt19937_64& rng) {
  double worst = 0.0;
  for (int K : {4, 8, 16}) {
    const TorusGrid g = make_simulation_grid(K);
    const FourierField f = random_real_field(g, rng);
    worst = std::max(worst, rel_diff(forward_transform(inverse_transform(f)), f));
  }
  return item("transform_round_trip", worst, 1e-12);
}

SelfcheckItem p2_p1(std::mt19937_64& rng) {
  double mismatches = 0.0;
  for (int N = 0; N <= 3; ++N) {
    const TorusGrid g = default_grid(N);
    const FourierField f = random_real_field(g, rng);
    const FourierField p1 = apply_PN(f, N, 1);
    const FourierField p21 = apply_PN(p1, N, 2);
    for (std::size_t i = 0; i < f.coeffs().size(); ++i) {
      if (p21.coeffs()[i] != p1.coeffs()[i]) mismatches += 1.0;
    }
  }
  return item("P2_P1_equals_P1", mismatches, 0.0);
}

}  // namespace

std::vector<SelfcheckItem> run_selfcheck(std::uint64_t seed) {
  auto rng = make_engine(seed, 0, StreamPurpose::selfcheck);
  std::vector<SelfcheckItem> out;
  out.push_back(partition_of_unity());
  out.push_back(bony(rng));
  out.push_back(heat());
  out.push_back(parseval(rng));
  out.push_back(round_trip(rng));
  out.push_back(p2_p1(rng));
  return out;
}

}  // namespace phi4
