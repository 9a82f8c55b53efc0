#include "phi4/renormalization.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <sstream>
#include <stdexcept>
#include <vector>

#include "phi4/errors.hpp"
#include "phi4/kernels.hpp"
#include "phi4/multipliers.hpp"

namespace phi4 {

void ModelParams::validate() const {
  auto fail = [](const std::string& m) { throw std::invalid_argument(m); };
  if (N < 0) fail("N must be >= 0");
  if (!(m0 > 0.0)) fail("m0 must be > 0");
  if (!(lambda0 > 0.0)) fail("lambda0 must be > 0");
  if (!(lambda >= 0.0 && lambda <= lambda0)) fail("need 0 <= lambda <= lambda0");
  if (!(T >= 0.0)) fail("T must be >= 0");
  if (!(dt > 0.0)) fail("dt must be > 0");
  if (T > 0.0 && dt > T) fail("dt must be <= T");
  if (grid.K < pn_min_K(N, 1)) fail("grid K does not resolve P_N^(1)");
  if (!grid.cubic_safe()) fail("grid M must be >= 4K+1");
}

TorusGrid default_grid(int N) { return make_simulation_grid(pn_min_K(N, 2)); }

double compute_C1(int N, double m0) {
  const int L = 1 << (N + 1);
  std::vector<double> w2(2 * L - 1);
  for (int a = -(L - 1); a <= L - 1; ++a) {
    const double w = psi1(std::ldexp(std::abs(a), -N));
    w2[a + L - 1] = w * w;
  }
  const double m2 = m0 * m0;
  double sum = 0.0;
  for (int a = -(L - 1); a <= L - 1; ++a)
    for (int b = -(L - 1); b <= L - 1; ++b) {
      double row = 0.0;
      for (int c = -(L - 1); c <= L - 1; ++c) {
        const double w = w2[a + L - 1] * w2[b + L - 1] * w2[c + L - 1];
        if (w != 0.0) row += w / (a * a + b * b + c * c + m2);
      }
      sum += row;
    }
  return sum / (2.0 * torus_volume);
}

namespace {

// One axis of the pair (l1, l2): components (a, b) with a+b also inside the
// cutoff box. Pairs related by (a,b) -> (-a,-b) share every quantity the
// summand depends on and are merged with multiplicity 2.
struct AxisPair {
  double weight;  // multiplicity * psi(a)^2 psi(b)^2 psi(a+b)^2
  double a2, b2, c2;
};

std::vector<AxisPair> axis_pairs(int N) {
  const int L = 1 << (N + 1);
  auto w2 = [N](int a) {
    const double w = psi1(std::ldexp(std::abs(a), -N));
    return w * w;
  };
  std::vector<AxisPair> out;
  for (int a = 0; a < L; ++a) {
    for (int b = -(L - 1); b < L; ++b) {
      if (a == 0 && b < 0) continue;  // representative of the sign orbit
      const int c = a + b;
      if (std::abs(c) >= L) continue;
      const double w = w2(a) * w2(b) * w2(c);
      if (w == 0.0) continue;
      const double mult = (a == 0 && b == 0) ? 1.0 : 2.0;
      out.push_back({mult * w, double(a) * a, double(b) * b, double(c) * c});
    }
  }
  return out;
}

void check_budget(int N, int max_N) {
  if (N < 0) throw std::invalid_argument("C2: N must be >= 0");
  if (N > max_N) {
    std::ostringstream msg;
    msg << "C2 lattice sum for N=" << N << " exceeds the budget (max_N=" << max_N
        << "); estimated " << c2_cost_estimate(N) << " kernel evaluations";
    throw BudgetError(msg.str(), c2_cost_estimate(N));
  }
}

// Sum over triples of axis pairs, one per coordinate axis, reduced to
// multisets p <= q <= r weighted by the number of distinct orderings.
// `kernel(l1sq, l2sq, l12sq)` returns the non-weight factor of the summand.
template <class Kernel>
double axis_triple_sum(const std::vector<AxisPair>& P, Kernel kernel) {
  const auto n = static_cast<std::ptrdiff_t>(P.size());
  std::vector<double> partial(P.size(), 0.0);
#pragma omp parallel for schedule(dynamic, 1)
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    const AxisPair& p = P[i];
    double acc_i = 0.0;
    for (std::ptrdiff_t j = i; j < n; ++j) {
      const AxisPair& q = P[j];
      const double wij = p.weight * q.weight;
      const double A = p.a2 + q.a2, B = p.b2 + q.b2, C = p.c2 + q.c2;
      double acc_j = 0.0;
      // r == j
      {
        const AxisPair& r = P[j];
        const double mult = (i == j) ? 1.0 : 3.0;
        acc_j += mult * r.weight * kernel(A + r.a2, B + r.b2, C + r.c2);
      }
      const double mult = (i == j) ? 3.0 : 6.0;
      double acc_r = 0.0;
      for (std::ptrdiff_t k = j + 1; k < n; ++k) {
        const AxisPair& r = P[k];
        acc_r += r.weight * kernel(A + r.a2, B + r.b2, C + r.c2);
      }
      acc_j += mult * acc_r;
      acc_i += wij * acc_j;
    }
    partial[i] = acc_i;
  }
  double s = 0.0;
  for (double x : partial) s += x;
  return s;
}

}  // namespace

double c2_cost_estimate(int N) {
  const int L = 1 << (N + 1);
  // canonical axis pairs ~ (3 L^2) / 2, multisets ~ n^3 / 6
  const double n = 1.5 * double(L) * L;
  return n * n * n / 6.0;
}

double compute_C2(int N, double m0, int max_N) {
  check_budget(N, max_N);
  const double m2 = m0 * m0;
  const double s = axis_triple_sum(axis_pairs(N), [m2](double A, double B, double C) {
    return 1.0 / ((A + m2) * (B + m2) * (A + B + C + 3.0 * m2));
  });
  return s / (2.0 * torus_volume * torus_volume);
}

double resonance_mean_discrete(int N, double m0, double dt, int max_N) {
  check_budget(N, max_N);
  if (!(dt > 0.0)) throw std::invalid_argument("resonance_mean_discrete: dt > 0");
  const double m2 = m0 * m0;
  const double s = axis_triple_sum(axis_pairs(N), [m2, dt](double A, double B, double C) {
    const double w1 = A + m2, w2 = B + m2, w12 = C + m2;
    const double S = w1 + w2 + w12;
    const double phi12 = -std::expm1(-w12 * dt) / w12;
    return phi12 * std::exp(-(w1 + w2) * dt) / (-std::expm1(-S * dt)) / (w1 * w2);
  });
  return s / (2.0 * torus_volume * torus_volume);
}

RenormConstants make_constants(int N, double m0, int max_N) {
  return {N, m0, compute_C1(N, m0), compute_C2(N, m0, max_N)};
}

namespace {

// P_N^(1) phi restricted to the cube |k_i| <= 2^{N+1}, which is all U_N sees,
// on a grid with M >= 4K'+1 so that the quartic integral is exact.
TorusGrid energy_grid(int N) { return make_simulation_grid(pn_min_K(N, 1)); }

double energy_on_reduced(const FourierField& p1phi, const ModelParams& params,
                         const RenormConstants& consts) {
  const RealField x = inverse_transform(p1phi);
  const double h = x.grid().h;
  const double h3 = h * h * h;
  const double quart = h3 * kernels::sum_abs_pow(x.values(), 4.0);
  const double quad = l2_norm_sq(p1phi);
  const double c = consts.C1 - 3.0 * params.lambda * consts.C2;
  return params.lambda / 4.0 * quart - 1.5 * params.lambda * c * quad;
}

}  // namespace

double energy_UN(const FourierField& phi, const ModelParams& params,
                 const RenormConstants& consts) {
  const FourierField p1 = apply_PN(phi, params.N, 1);
  return energy_on_reduced(resample(p1, energy_grid(params.N)), params, consts);
}

namespace {

// Fills every mode of the cube |k_i| <= K of f (leaving others untouched when
// skip_inner >= 0: modes with all |k_i| <= skip_inner are not drawn).
void fill_mu0(FourierField& f, double m0, std::mt19937_64& rng, int skip_inner) {
  std::normal_distribution<double> g(0.0, 1.0);
  const int K = f.grid().K;
  const double m2 = m0 * m0;
  for (int k1 = 0; k1 <= K; ++k1)
    for (int k2 = (k1 == 0 ? 0 : -K); k2 <= K; ++k2)
      for (int k3 = (k1 == 0 && k2 == 0 ? 0 : -K); k3 <= K; ++k3) {
        if (std::abs(k1) <= skip_inner && std::abs(k2) <= skip_inner &&
            std::abs(k3) <= skip_inner)
          continue;
        const Mode k{k1, k2, k3};
        const double w = k.norm_sq() + m2;
        if (k == Mode{}) {
          f.set(k, {g(rng) / std::sqrt(2.0 * w), 0.0});
        } else {
          const double sd = 1.0 / std::sqrt(4.0 * w);
          const double re = g(rng);
          const double im = g(rng);
          f.set(k, {sd * re, sd * im});
        }
      }
}

}  // namespace

FourierField sample_mu0(const TorusGrid& grid, double m0, std::mt19937_64& rng) {
  if (!(m0 > 0.0)) throw std::invalid_argument("sample_mu0: m0 must be > 0");
  FourierField f(grid);
  fill_mu0(f, m0, rng, -1);
  return f;
}

PcnResult metropolis_muN(const ModelParams& params, const RenormConstants& consts,
                         int n_steps, std::mt19937_64& rng, double beta,
                         const std::optional<FourierField>& start) {
  if (!(beta > 0.0 && beta <= 1.0)) {
    throw std::invalid_argument("metropolis_muN: beta must be in (0,1]");
  }
  if (n_steps < 0) throw std::invalid_argument("metropolis_muN: n_steps < 0");
  const TorusGrid& full = params.grid;
  if (full.K < pn_min_K(params.N, 1)) {
    throw std::invalid_argument("metropolis_muN: grid does not resolve P_N^(1)");
  }
  const TorusGrid low = energy_grid(params.N);
  const auto& w = *pn_multiplier(low, params.N, 1);

  FourierField cur = start ? resample(*start, low) : sample_mu0(low, params.m0, rng);
  auto energy = [&](const FourierField& f) {
    FourierField p = f;
    kernels::scale_modes(p.coeffs_mut(), w);
    return energy_on_reduced(p, params, consts);
  };
  double u_cur = energy(cur);
  const double keep = std::sqrt(1.0 - beta * beta);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  long accepted = 0;
  FourierField prop(low);
  for (int s = 0; s < n_steps; ++s) {
    const FourierField xi = sample_mu0(low, params.m0, rng);
    auto pc = prop.coeffs_mut();
    auto cc = cur.coeffs();
    auto xc = xi.coeffs();
    for (std::size_t i = 0; i < pc.size(); ++i) pc[i] = keep * cc[i] + beta * xc[i];
    const double u_prop = energy(prop);
    const double log_a = u_cur - u_prop;
    const double u = unif(rng);
    if (log_a >= 0.0 || u < std::exp(log_a)) {
      std::swap(cur, prop);
      u_cur = u_prop;
      ++accepted;
    }
  }
  FourierField out = resample(cur, full);
  fill_mu0(out, params.m0, rng, low.K);
  return {std::move(out),
          n_steps > 0 ? static_cast<double>(accepted) / n_steps : 0.0};
}

}  // namespace phi4
