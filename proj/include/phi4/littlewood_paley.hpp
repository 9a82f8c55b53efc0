#pragma once

// Nonhomogeneous Littlewood-Paley blocks, Besov norms and Bony paraproducts.
//
// theta is smooth, 1 on [0,1] and 0 on [4/3,inf); chi = theta and
// phi(r) = theta(r/2) - theta(r), so chi + sum_j phi(2^{-j} .) telescopes to 1.
// With Delta_{-2} = 0 and S_j = sum_{i<j} Delta_i:
//   f <  g = sum_{j>=0}  S_j f  Delta_{j+1} g
//   f =  g = sum_{j>=-1} Delta_j f (Delta_{j-1} + Delta_j + Delta_{j+1}) g
//   f >  g = g < f

#include <cmath>
#include <limits>
#include <vector>

#include "phi4/kernels.hpp"
#include "phi4/torus_spectral.hpp"

namespace phi4 {

struct BesovSpec {
  double s = 0.0;
  double p = 2.0;
  double r = std::numeric_limits<double>::infinity();
};

struct DyadicPartition {
  double theta(double r) const;
  double chi(double r) const { return theta(r); }
  double phi(double r) const { return theta(r / 2.0) - theta(r); }
  /// Multiplier of Delta_j at radius r (chi for j = -1).
  double weight(int j, double r) const;
  /// ceil(log2(sqrt(3) K / (3/4))) + 1: every block above is empty.
  int j_max(const TorusGrid& grid) const;
};

DyadicPartition make_partition();

FourierField dyadic_block(const FourierField& F, int j);

/// Physical samples of every nonempty block Delta_j F, j = -1..j_max.
class BlockDecomposition {
 public:
  BlockDecomposition() = default;
  explicit BlockDecomposition(const FourierField& F);

  const TorusGrid& grid() const { return grid_; }
  int j_max() const { return static_cast<int>(blocks_.size()) - 2; }
  bool nonempty(int j) const { return nonempty_[j + 1]; }
  const RealField& block(int j) const { return blocks_[j + 1]; }

 private:
  TorusGrid grid_;
  std::vector<RealField> blocks_;
  std::vector<bool> nonempty_;
};

/// l^r over j of 2^{js} ||Delta_j F||_{L^p}.
double besov_norm(const FourierField& F, const BesovSpec& spec);
double besov_norm(const BlockDecomposition& D, const BesovSpec& spec);

struct BonyParts {
  FourierField lt;   // f < g
  FourierField res;  // f = g
  FourierField gt;   // f > g
};

/// All three parts at once; requires a cubic-safe grid.
BonyParts bony_parts(const FourierField& f, const FourierField& g,
                     kernels::Exec exec = kernels::Exec::parallel);
BonyParts bony_parts(const BlockDecomposition& f, const BlockDecomposition& g,
                     kernels::Exec exec = kernels::Exec::parallel);

FourierField para_lt(const FourierField& f, const FourierField& g);
FourierField para_gt(const FourierField& f, const FourierField& g);
FourierField resonance(const FourierField& f, const FourierField& g);
FourierField para_leq(const FourierField& f, const FourierField& g);
FourierField para_geq(const FourierField& f, const FourierField& g);

FourierField para_lt(const BlockDecomposition& f, const BlockDecomposition& g);
FourierField resonance(const BlockDecomposition& f, const BlockDecomposition& g);

}  // namespace phi4
