#include "phi4/ou_enhancement.hpp"

#include <cmath>
#include <stdexcept>

#include "phi4/kernels.hpp"
#include "phi4/littlewood_paley.hpp"
#include "phi4/rng.hpp"

namespace phi4 {

namespace {

void fill_noise(FourierField& f, double dt, std::mt19937_64& rng) {
  if (dt == 0.0) return;
  std::normal_distribution<double> g(0.0, 1.0);
  const int K = f.grid().K;
  const double sd = std::sqrt(dt / 2.0);
  const double sd0 = std::sqrt(dt);
  for (int k1 = 0; k1 <= K; ++k1)
    for (int k2 = (k1 == 0 ? 0 : -K); k2 <= K; ++k2)
      for (int k3 = (k1 == 0 && k2 == 0 ? 0 : -K); k3 <= K; ++k3) {
        const Mode k{k1, k2, k3};
        if (k == Mode{}) {
          f.set(k, {sd0 * g(rng), 0.0});
        } else {
          const double re = g(rng);
          const double im = g(rng);
          f.set(k, {sd * re, sd * im});
        }
      }
}

}  // namespace

NoiseIncrement draw_noise(const TorusGrid& grid, double dt, std::mt19937_64& rng) {
  if (dt < 0.0) throw std::invalid_argument("draw_noise: dt must be >= 0");
  NoiseIncrement n{FourierField(grid), dt, 0, 0};
  fill_noise(n.dW, dt, rng);
  return n;
}

NoiseIncrement draw_noise(const TorusGrid& grid, double dt, std::uint64_t seed,
                          std::uint64_t stream, std::int64_t step) {
  auto rng = make_engine(seed, stream, StreamPurpose::noise, step);
  NoiseIncrement n = draw_noise(grid, dt, rng);
  n.stream = stream;
  n.step = step;
  return n;
}

OuOperator::OuOperator(const TorusGrid& grid, double dt, double m0)
    : duhamel_(grid, dt, m0) {
  const FourierField probe(grid);
  sigma_over_sqrt_dt_.resize(grid.mode_count());
  for (std::size_t i = 0; i < sigma_over_sqrt_dt_.size(); ++i) {
    const double w = probe.mode_at(i).norm_sq() + m0 * m0;
    const double var = -std::expm1(-2.0 * w * dt) / (2.0 * w);
    sigma_over_sqrt_dt_[i] = std::sqrt(var / dt);
  }
}

FourierField OuOperator::stochastic_term(const NoiseIncrement& dW) const {
  if (!(dW.dW.grid() == duhamel_.grid()) || dW.dt != duhamel_.dt()) {
    throw std::invalid_argument("OU step: increment does not match grid/dt");
  }
  FourierField s = dW.dW;
  kernels::scale_modes(s.coeffs_mut(), sigma_over_sqrt_dt_);
  return s;
}

void OuOperator::step(FourierField& Z, const NoiseIncrement& dW) const {
  duhamel_.decay(Z);
  Z += stochastic_term(dW);
}

FourierField ou_stochastic_term(const NoiseIncrement& dW, double m0) {
  return OuOperator(dW.dW.grid(), dW.dt, m0).stochastic_term(dW);
}

FourierField step_Z(const FourierField& Z, const NoiseIncrement& dW, double m0) {
  FourierField out = Z;
  OuOperator(Z.grid(), dW.dt, m0).step(out, dW);
  return out;
}

NoiseIncrement coarsen_noise(std::span<const NoiseIncrement> fine, double m0) {
  if (fine.empty()) throw std::invalid_argument("coarsen_noise: no increments");
  const TorusGrid grid = fine.front().dW.grid();
  const double dtf = fine.front().dt;
  const OuOperator f_op(grid, dtf, m0);
  // Y = sum_i e^{-w (n-1-i) dtf} sigma_f xi_i, accumulated forward.
  FourierField Y(grid);
  for (const auto& inc : fine) {
    if (inc.dt != dtf) throw std::invalid_argument("coarsen_noise: mixed dt");
    f_op.step(Y, inc);
  }
  const double dtc = dtf * static_cast<double>(fine.size());
  const OuOperator c_op(grid, dtc, m0);
  // dW_c = sqrt(dtc) Y / sigma_c
  NoiseIncrement out{FourierField(grid), dtc, fine.front().stream, fine.front().step};
  const FourierField probe(grid);
  auto dst = out.dW.coeffs_mut();
  auto src = Y.coeffs();
  for (std::size_t i = 0; i < dst.size(); ++i) {
    const double w = probe.mode_at(i).norm_sq() + m0 * m0;
    const double sigma_c = std::sqrt(-std::expm1(-2.0 * w * dtc) / (2.0 * w));
    dst[i] = src[i] * (std::sqrt(dtc) / sigma_c);
  }
  return out;
}

WickPowers wick_powers(const FourierField& Z, int N, double C1) {
  if (!Z.grid().cubic_safe()) {
    throw std::invalid_argument("wick_powers: grid is not cubic-safe");
  }
  WickPowers w{apply_PN(Z, N, 1), {}, {}};
  const RealField x = inverse_transform(w.Z1);
  RealField x2(x.grid()), x3(x.grid());
  auto v = x.values();
  auto v2 = x2.values_mut();
  auto v3 = x3.values_mut();
  for (std::size_t i = 0; i < v.size(); ++i) {
    const double a = v[i];
    v2[i] = a * a - C1;
    v3[i] = a * a * a - 3.0 * C1 * a;
  }
  w.Z2 = forward_transform(x2);
  w.Z3 = forward_transform(x3);
  return w;
}

void step_convolved(EnhancedState& s, const DuhamelOperator& op) {
  const FourierField p1z2 = apply_PN(s.Z2, s.N, 1);
  op.step(s.Z02, p1z2);
  op.step(s.Z03, apply_PN(s.Z3, s.N, 1));
  op.step(s.J, apply_PN(p1z2, s.N, 1));
}

void resonance_objects(EnhancedState& s) {
  auto blocks = std::make_shared<const BlockDecomposition>(s.Z2);
  const BlockDecomposition& z2 = *blocks;
  s.Z22 = resonance(z2, BlockDecomposition(apply_PN(s.Z02, s.N, 1)));
  s.Z22 -= FourierField::constant(s.Z22.grid(), s.consts.C2);
  s.Z23 = resonance(z2, BlockDecomposition(apply_PN(s.Z03, s.N, 1)));
  s.Z23 -= (3.0 * s.consts.C2) * s.Z1;
  s.resonances_current = true;
  s.Z2_blocks = std::move(blocks);
}

namespace {

void refresh_wick(EnhancedState& s) {
  WickPowers w = wick_powers(s.Z, s.N, s.consts.C1);
  s.Z1 = std::move(w.Z1);
  s.Z2 = std::move(w.Z2);
  s.Z3 = std::move(w.Z3);
  s.Z2_blocks.reset();
}

}  // namespace

void advance_enhanced(EnhancedState& s, const NoiseIncrement& dW, const OuOperator& ou,
                      bool with_resonances) {
  step_convolved(s, ou.duhamel());
  ou.step(s.Z, dW);
  s.t += ou.dt();
  refresh_wick(s);
  s.resonances_current = false;
  if (with_resonances) resonance_objects(s);
}

std::int64_t burn_in_steps(double burn_in_T, double dt) {
  if (burn_in_T < 0.0) throw std::invalid_argument("burn-in time must be >= 0");
  return static_cast<std::int64_t>(std::llround(burn_in_T / dt));
}

EnhancedState fresh_enhanced(const ModelParams& params, const RenormConstants& consts,
                             std::uint64_t stream, double t0) {
  EnhancedState s;
  s.t = t0;
  s.N = params.N;
  s.m0 = params.m0;
  s.consts = consts;
  auto rng = make_engine(params.seed, stream, StreamPurpose::initial_z);
  s.Z = sample_mu0(params.grid, params.m0, rng);
  s.Z02 = FourierField(params.grid);
  s.Z03 = FourierField(params.grid);
  s.J = FourierField(params.grid);
  s.J0 = FourierField(params.grid);
  refresh_wick(s);
  return s;
}

void start_observation(EnhancedState& s) {
  s.J0 = std::move(s.J);
  s.J = FourierField(s.J0.grid());
  s.t = 0.0;
}

EnhancedState init_enhanced(const ModelParams& params, const RenormConstants& consts,
                            std::uint64_t stream, double burn_in_T) {
  const std::int64_t nb = burn_in_steps(burn_in_T, params.dt);
  EnhancedState s = fresh_enhanced(params, consts, stream, -nb * params.dt);
  const OuOperator ou(params.grid, params.dt, params.m0);
  for (std::int64_t n = -nb; n < 0; ++n) {
    advance_enhanced(s, draw_noise(params.grid, params.dt, params.seed, stream, n), ou,
                     false);
  }
  start_observation(s);
  resonance_objects(s);
  return s;
}

}  // namespace phi4
