#include "phi4/multipliers.hpp"

#include <cmath>
#include <map>
#include <mutex>
#include <stdexcept>
#include <string>
#include <tuple>

#include "phi4/kernels.hpp"

namespace phi4 {

double smooth_step_down(double t) {
  if (t <= 0.0) return 1.0;
  if (t >= 1.0) return 0.0;
  const double a = std::exp(-1.0 / (1.0 - t));
  const double b = std::exp(-1.0 / t);
  return a / (a + b);
}

double psi1(double r) { return smooth_step_down(r - 1.0); }

double psi2(double r) {
  if (r <= 2.0) return 1.0;
  if (r >= 4.0) return 0.0;
  return (4.0 - r) / 2.0;
}

namespace {

double profile(double r, int which) { return which == 1 ? psi1(r) : psi2(r); }

void check_which(int which) {
  if (which != 1 && which != 2) {
    throw std::invalid_argument("P_N: which must be 1 or 2");
  }
}

}  // namespace

double pn_weight(const Mode& k, int N, int which) {
  check_which(which);
  const double s = std::ldexp(1.0, -N);
  return profile(s * std::abs(k.k1), which) * profile(s * std::abs(k.k2), which) *
         profile(s * std::abs(k.k3), which);
}

int pn_min_K(int N, int which) {
  check_which(which);
  return 1 << (N + which);
}

std::shared_ptr<const std::vector<double>> pn_multiplier(const TorusGrid& grid,
                                                         int N, int which) {
  check_which(which);
  if (N < 0) throw std::invalid_argument("P_N: N must be >= 0");
  static std::mutex mu;
  static std::map<std::tuple<int, int, int>,
                  std::shared_ptr<const std::vector<double>>>
      cache;
  const auto key = std::make_tuple(grid.K, N, which);
  std::lock_guard<std::mutex> lock(mu);
  if (auto it = cache.find(key); it != cache.end()) return it->second;

  const int K = grid.K;
  const double s = std::ldexp(1.0, -N);
  std::vector<double> axis(2 * K + 1);
  for (int k = -K; k <= K; ++k) axis[k + K] = profile(s * std::abs(k), which);
  auto w = std::make_shared<std::vector<double>>(grid.mode_count());
  std::size_t i = 0;
  for (int a = 0; a <= 2 * K; ++a)
    for (int b = 0; b <= 2 * K; ++b)
      for (int c = 0; c <= 2 * K; ++c) (*w)[i++] = axis[a] * axis[b] * axis[c];
  cache.emplace(key, w);
  return w;
}

FourierField apply_PN(const FourierField& F, int N, int which) {
  const int need = pn_min_K(N, which);
  if (F.grid().K < need) {
    throw std::invalid_argument("apply_PN: K=" + std::to_string(F.grid().K) +
                                " < " + std::to_string(need) +
                                " does not resolve the multiplier support");
  }
  FourierField out = F;
  kernels::scale_modes(out.coeffs_mut(), *pn_multiplier(F.grid(), N, which));
  return out;
}

FourierField heat_semigroup(const FourierField& F, double t, double m0) {
  if (t < 0.0) throw std::invalid_argument("heat_semigroup: t must be >= 0");
  FourierField out = F;
  auto c = out.coeffs_mut();
  for (std::size_t i = 0; i < c.size(); ++i) {
    const double w = out.mode_at(i).norm_sq() + m0 * m0;
    c[i] *= std::exp(-t * w);
  }
  return out;
}

FourierField duhamel_step(const FourierField& state, const FourierField& forcing,
                          double dt, double m0) {
  DuhamelOperator op(state.grid(), dt, m0);
  FourierField out = state;
  op.step(out, forcing);
  return out;
}

DuhamelOperator::DuhamelOperator(const TorusGrid& grid, double dt, double m0)
    : grid_(grid), dt_(dt), m0_(m0) {
  if (!(dt > 0.0)) throw std::invalid_argument("Duhamel step: dt must be > 0");
  if (!(m0 > 0.0)) throw std::invalid_argument("Duhamel step: m0 must be > 0");
  const FourierField probe(grid);
  decay_.resize(grid.mode_count());
  phi_.resize(grid.mode_count());
  for (std::size_t i = 0; i < decay_.size(); ++i) {
    const double w = probe.mode_at(i).norm_sq() + m0 * m0;
    decay_[i] = std::exp(-w * dt);
    phi_[i] = -std::expm1(-w * dt) / w;
  }
}

void DuhamelOperator::step(FourierField& state, const FourierField& forcing) const {
  if (!(state.grid() == grid_) || !(forcing.grid() == grid_)) {
    throw std::invalid_argument("DuhamelOperator: grid mismatch");
  }
  auto s = state.coeffs_mut();
  auto f = forcing.coeffs();
  for (std::size_t i = 0; i < s.size(); ++i) s[i] = decay_[i] * s[i] + phi_[i] * f[i];
}

void DuhamelOperator::decay(FourierField& state) const {
  if (!(state.grid() == grid_)) {
    throw std::invalid_argument("DuhamelOperator: grid mismatch");
  }
  kernels::scale_modes(state.coeffs_mut(), decay_);
}

}  // namespace phi4
