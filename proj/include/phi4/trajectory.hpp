#pragma once

// One trajectory of the coupled (X~, Z) system: xi_N from a pCN chain and
// zeta ~ mu0 placed at t = -burn_in, co-evolved with shared keyed noise up to
// t = 0, then observed with the full enhancement and the decomposed system.

#include <cstdint>

#include "phi4/sqe_solver.hpp"

namespace phi4 {

struct TrajectoryOptions {
  double burn_in_T = 5.0;
  int pcn_steps = 10000;
  double pcn_beta = 0.2;
  bool decomposed = true;
};

struct Observables {
  std::int64_t step = 0;
  double t = 0.0;
  double p2x_l2sq = 0.0;   // ||P2 X~||^2_{L2}
  double energy = 0.0;     // U_N(X~)
  double x2_l2sq = 0.0;    // ||X2||^2_{L2}
  double xlt_l2sq = 0.0;   // ||Xlt||^2_{L2}
  double xgeq_l2sq = 0.0;  // ||Xgeq||^2_{L2}
  double split_gap = 0.0;  // ||Xlt + Xgeq - X2||_{L2} / ||X2||_{L2}
};

class Trajectory {
 public:
  /// Noise, initial fields and the pCN chain are all keyed by
  /// (params.seed, stream).
  Trajectory(const ModelParams& params, const RenormConstants& consts, std::uint64_t stream,
             const TrajectoryOptions& options = {});

  /// Advances one dt with the increment keyed by the current step index.
  void step();

  std::int64_t steps_taken() const { return step_; }
  double time() const { return sqe_.t; }
  std::uint64_t stream() const { return stream_; }
  double pcn_acceptance() const { return pcn_acceptance_; }

  const SqeState& sqe() const { return sqe_; }
  const EnhancedState& enhanced() const { return enh_; }
  const ModelParams& params() const { return sqe_.params; }

  FourierField X2() const { return derive_X2(sqe_.Xtilde, enh_, sqe_.params); }
  Observables observe() const;

 private:
  std::uint64_t stream_;
  TrajectoryOptions options_;
  OuOperator ou_;
  EnhancedState enh_;
  SqeState sqe_;
  std::int64_t step_ = 0;
  double pcn_acceptance_ = 0.0;
};

}  // namespace phi4
