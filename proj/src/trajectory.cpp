#include "phi4/trajectory.hpp"

#include <cmath>

#include "phi4/multipliers.hpp"
#include "phi4/rng.hpp"

namespace phi4 {

Trajectory::Trajectory(const ModelParams& params, const RenormConstants& consts,
                       std::uint64_t stream, const TrajectoryOptions& options)
    : stream_(stream), options_(options), ou_(params.grid, params.dt, params.m0) {
  params.validate();
  auto rng = make_engine(params.seed, stream, StreamPurpose::pcn);
  PcnResult xi = metropolis_muN(params, consts, options.pcn_steps, rng, options.pcn_beta);
  pcn_acceptance_ = xi.acceptance_rate;

  const std::int64_t nb = burn_in_steps(options.burn_in_T, params.dt);
  enh_ = fresh_enhanced(params, consts, stream, -static_cast<double>(nb) * params.dt);
  SqeState burn;
  burn.t = enh_.t;
  burn.params = params;
  burn.consts = consts;
  burn.Xtilde = std::move(xi.sample);
  burn.decomposed = false;
  for (std::int64_t n = -nb; n < 0; ++n) {
    const NoiseIncrement dW = draw_noise(params.grid, params.dt, params.seed, stream, n);
    step_sqe(burn, dW, ou_);
    advance_enhanced(enh_, dW, ou_, false);
  }
  start_observation(enh_);
  resonance_objects(enh_);
  sqe_ = init_sqe(params, consts, burn.Xtilde, enh_, options.decomposed);
}

void Trajectory::step() {
  const ModelParams& p = sqe_.params;
  advance(sqe_, enh_, draw_noise(p.grid, p.dt, p.seed, stream_, step_), ou_);
  ++step_;
}

Observables Trajectory::observe() const {
  const ModelParams& p = sqe_.params;
  Observables o;
  o.step = step_;
  o.t = sqe_.t;
  o.p2x_l2sq = l2_norm_sq(apply_PN(sqe_.Xtilde, p.N, 2));
  o.energy = energy_UN(sqe_.Xtilde, p, sqe_.consts);
  const FourierField x2 = X2();
  o.x2_l2sq = l2_norm_sq(x2);
  if (sqe_.decomposed) {
    o.xlt_l2sq = l2_norm_sq(sqe_.Xlt);
    o.xgeq_l2sq = l2_norm_sq(sqe_.Xgeq);
    const double gap = l2_norm_sq(sqe_.Xlt + sqe_.Xgeq - x2);
    o.split_gap = o.x2_l2sq > 0.0 ? std::sqrt(gap / o.x2_l2sq) : std::sqrt(gap);
  }
  return o;
}

}  // namespace phi4
