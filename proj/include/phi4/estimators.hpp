#pragma once

// Moment functionals of the remainder X2 and its split, the sup-in-time norms
// of the stochastic objects, and ensemble uniformity reports across cutoffs.
//
// Every supremum over time is a maximum over stored snapshots and so a lower
// bound for the continuum supremum. B_inf norms use grid maxima.

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "phi4/littlewood_paley.hpp"
#include "phi4/ou_enhancement.hpp"

namespace phi4 {

struct ExponentSet {
  double alpha = 0.45;
  double eps = 0.005;
  double gamma = 0.02;
  double eta = 0.55;
  double q = 1.1;
  double eps_tilde = 0.05;

  /// Throws ConfigError naming the first violated constraint, e.g.
  /// "2ε < γ violated: ε=0.02, γ=0.03".
  void validate() const;
  bool operator==(const ExponentSet&) const = default;
};

struct LpSpec {
  double p = 2.0;
};
using SeminormSpec = std::variant<BesovSpec, LpSpec>;

/// Snapshots of one trajectory at uniformly spaced times.
struct SnapshotSeries {
  int N = 0;
  std::vector<double> t;
  std::vector<FourierField> X2, Xlt, Xgeq;

  void add(double time, FourierField x2, FourierField xlt, FourierField xgeq);
  std::size_t size() const { return t.size(); }
};

/// max over snapshot pairs s < t of s^eta ||f_t - f_s|| / (t - s)^gamma.
double holder_seminorm(std::span<const double> t, std::span<const FourierField> f,
                       double eta, double gamma, const SeminormSpec& norm);

/// int_0^T (||grad Xgeq||^2 + ||X2||^2 + lambda ||P1 X2||_{L4}^4) ds (trapezoid)
/// + the weighted Hoelder quotient of X2 in L^{4/3}.
double functional_X(const SnapshotSeries& s, const ExponentSet& ex, double lambda);

/// int_0^T ||Xlt||^3_{B_4^{1-eps}} ds + int_0^T ||Xgeq||_{B_{4/3}^{1+eps}} ds.
double functional_Y(const SnapshotSeries& s, double eps);

/// max over snapshots r > 0 of r^eta ||f_r||^power in the given Besov norm.
double sup_weighted(std::span<const double> t, std::span<const FourierField> f, double eta,
                    const BesovSpec& spec, double power);

inline constexpr std::size_t zs_count = 10;
inline constexpr std::array<const char*, zs_count> zs_names = {
    "Z1_Binf",        "P2Z_Binf",        "Z2_Binf",          "Z22_Binf",
    "Z02_Binf",       "Z03_Binf",        "Z23_Binf",         "Z1_P1Z03_Binf",
    "Z1_P1Z03sq_Binf", "Z03_holder_Linf"};

/// Collects the sup-in-time norms of the stochastic objects snapshot by
/// snapshot; keeps Z03 for the pairwise Hoelder quotient.
class ZsAccumulator {
 public:
  explicit ZsAccumulator(const ExponentSet& ex);
  void add(const EnhancedState& e);
  std::array<double, zs_count> values() const;

 private:
  ExponentSet ex_;
  std::array<double, zs_count - 1> sups_{};
  std::vector<double> t_;
  std::vector<FourierField> z03_;
};

std::array<double, zs_count> zs_sups(std::span<const EnhancedState> snapshots,
                                     const ExponentSet& ex);

/// Estimates from one trajectory.
struct EstimatorReport {
  int N = 0;
  std::uint64_t seed = 0;
  std::uint64_t stream = 0;
  double dt = 0.0;
  ExponentSet exponents;
  double X_functional = 0.0;
  double Y_functional = 0.0;
  double Y_q = 0.0;             // Y_functional^q
  double holder_seminorm = 0.0; // X2 in B_{4/3}^alpha
  double sup_lt = 0.0;          // sup r^eta ||Xlt||^3_{B_4^{alpha+2gamma}}
  double sup_geq = 0.0;         // sup r^eta ||Xgeq||_{B_{4/3}^{alpha+2gamma}}
  double x0_norm_sq = 0.0;      // ||P2 X~_0||^2_{B_inf^{-1/2-eps~}}
  std::array<double, zs_count> zs{};
};

EstimatorReport estimate_trajectory(const SnapshotSeries& s,
                                    const std::array<double, zs_count>& zs,
                                    const FourierField& Xtilde0, const ExponentSet& ex,
                                    double lambda);

/// Names of the per-trajectory quantities, in report order.
std::vector<std::string> report_quantities();
double report_value(const EstimatorReport& r, const std::string& quantity);

struct TightnessRow {
  int N = 0;
  std::string quantity;
  std::size_t n = 0;
  double mean = 0.0;
  double se = 0.0;
};

struct TightnessTable {
  double factor = 3.0;
  std::vector<TightnessRow> rows;
  /// Quantities whose ensemble mean increases strictly with N and ends more
  /// than `factor` times its value at the smallest N.
  std::vector<std::string> red_flags;
};

/// Groups reports by N. Throws std::invalid_argument with fewer than two
/// cutoffs or fewer than min_ensemble trajectories for some N.
TightnessTable tightness_report(std::span<const EstimatorReport> reports, double factor = 3.0,
                                std::size_t min_ensemble = 30);

}  // namespace phi4
