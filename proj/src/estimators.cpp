#include "phi4/estimators.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <sstream>
#include <stdexcept>

#include "phi4/errors.hpp"
#include "phi4/multipliers.hpp"

namespace phi4 {

namespace {

std::string fmt(double v) {
  std::ostringstream o;
  o << v;
  return o.str();
}

void require(bool ok, const std::string& what) {
  if (!ok) throw ConfigError(what);
}

}  // namespace

void ExponentSet::validate() const {
  require(2.0 * eps < gamma,
          "2ε < γ violated: ε=" + fmt(eps) + ", γ=" + fmt(gamma));
  require(eta > alpha + 2.0 * gamma, "η > α + 2γ violated: η=" + fmt(eta) + ", α=" +
                                         fmt(alpha) + ", γ=" + fmt(gamma));
  require(2.0 * alpha + 4.0 * gamma + eps < 1.0,
          "2α + 4γ + ε < 1 violated: α=" + fmt(alpha) + ", γ=" + fmt(gamma) +
              ", ε=" + fmt(eps));
  require(alpha >= 0.0 && alpha < 0.5, "α ∈ [0,1/2) violated: α=" + fmt(alpha));
  require(eps > 0.0 && eps <= 1.0 / 16.0, "ε ∈ (0,1/16] violated: ε=" + fmt(eps));
  require(gamma > 0.0 && gamma < 1.0 / 8.0, "γ ∈ (0,1/8) violated: γ=" + fmt(gamma));
  require(eta > 0.5 && eta < 1.0, "η ∈ (1/2,1) violated: η=" + fmt(eta));
  require(q > 1.0 && q < 8.0 / 7.0, "q ∈ (1,8/7) violated: q=" + fmt(q));
  require(eps_tilde > 0.0 && eps_tilde <= 1.0 / 16.0,
          "ε̃ ∈ (0,1/16] violated: ε̃=" + fmt(eps_tilde));
}

void SnapshotSeries::add(double time, FourierField x2, FourierField xlt, FourierField xgeq) {
  t.push_back(time);
  X2.push_back(std::move(x2));
  Xlt.push_back(std::move(xlt));
  Xgeq.push_back(std::move(xgeq));
}

namespace {

void require_series(std::span<const double> t, std::size_t fields) {
  if (t.size() < 2) throw std::invalid_argument("estimators need at least 2 snapshots");
  if (fields != t.size()) throw std::invalid_argument("snapshot count mismatch");
  for (std::size_t i = 1; i < t.size(); ++i) {
    if (!(t[i] > t[i - 1])) throw std::invalid_argument("snapshot times must increase");
  }
}

void require_uniform(std::span<const double> t) {
  const double h = t[1] - t[0];
  for (std::size_t i = 2; i < t.size(); ++i) {
    if (std::abs((t[i] - t[i - 1]) - h) > 1e-9 * std::max(1.0, std::abs(h))) {
      throw std::invalid_argument("snapshots must be uniformly spaced");
    }
  }
}

double trapezoid(std::span<const double> t, std::span<const double> v) {
  double acc = 0.0;
  for (std::size_t i = 1; i < t.size(); ++i) acc += 0.5 * (t[i] - t[i - 1]) * (v[i] + v[i - 1]);
  return acc;
}

double seminorm(const FourierField& f, const SeminormSpec& norm) {
  if (const auto* b = std::get_if<BesovSpec>(&norm)) return besov_norm(f, *b);
  return lp_norm(inverse_transform(f), std::get<LpSpec>(norm).p);
}

double gradient_sq(const FourierField& f) {
  double acc = 0.0;
  const auto c = f.coeffs();
  for (std::size_t i = 0; i < c.size(); ++i) acc += f.mode_at(i).norm_sq() * std::norm(c[i]);
  return acc;
}

std::vector<double> besov_norms(const FourierField& f, std::span<const BesovSpec> specs) {
  const BlockDecomposition d(f);
  std::vector<double> out;
  out.reserve(specs.size());
  for (const auto& s : specs) out.push_back(besov_norm(d, s));
  return out;
}

double weighted_max(std::span<const double> t, std::span<const double> v, double eta) {
  double m = 0.0;
  for (std::size_t i = 0; i < t.size(); ++i) {
    if (t[i] > 0.0) m = std::max(m, std::pow(t[i], eta) * v[i]);
  }
  return m;
}

}  // namespace

double holder_seminorm(std::span<const double> t, std::span<const FourierField> f, double eta,
                       double gamma, const SeminormSpec& norm) {
  require_series(t, f.size());
  if (!(gamma > 0.0 && gamma < 1.0)) throw std::invalid_argument("holder: γ must be in (0,1)");
  double m = 0.0;
  for (std::size_t i = 0; i < t.size(); ++i) {
    const double w = std::pow(t[i], eta);
    if (w == 0.0) continue;
    for (std::size_t j = i + 1; j < t.size(); ++j) {
      const double n = seminorm(f[j] - f[i], norm);
      m = std::max(m, w * n / std::pow(t[j] - t[i], gamma));
    }
  }
  return m;
}

double functional_X(const SnapshotSeries& s, const ExponentSet& ex, double lambda) {
  require_series(s.t, s.X2.size());
  require_uniform(s.t);
  std::vector<double> v(s.size());
  for (std::size_t i = 0; i < s.size(); ++i) {
    const double l4 = lp_norm(inverse_transform(apply_PN(s.X2[i], s.N, 1)), 4.0);
    v[i] = gradient_sq(s.Xgeq[i]) + l2_norm_sq(s.X2[i]) + lambda * std::pow(l4, 4);
  }
  return trapezoid(s.t, v) + holder_seminorm(s.t, s.X2, ex.eta, ex.gamma, LpSpec{4.0 / 3.0});
}

double functional_Y(const SnapshotSeries& s, double eps) {
  require_series(s.t, s.Xlt.size());
  require_uniform(s.t);
  std::vector<double> v(s.size());
  for (std::size_t i = 0; i < s.size(); ++i) {
    v[i] = std::pow(besov_norm(s.Xlt[i], {1.0 - eps, 4.0}), 3) +
           besov_norm(s.Xgeq[i], {1.0 + eps, 4.0 / 3.0});
  }
  return trapezoid(s.t, v);
}

double sup_weighted(std::span<const double> t, std::span<const FourierField> f, double eta,
                    const BesovSpec& spec, double power) {
  require_series(t, f.size());
  std::vector<double> v(t.size());
  for (std::size_t i = 0; i < t.size(); ++i) {
    v[i] = t[i] > 0.0 ? std::pow(besov_norm(f[i], spec), power) : 0.0;
  }
  return weighted_max(t, v, eta);
}

// ------------------------------------------------------------------ Zs

ZsAccumulator::ZsAccumulator(const ExponentSet& ex) : ex_(ex) {}

void ZsAccumulator::add(const EnhancedState& e) {
  if (!t_.empty() && !(e.t > t_.back())) {
    throw std::invalid_argument("ZsAccumulator: snapshot times must increase");
  }
  if (!e.resonances_current) throw std::invalid_argument("ZsAccumulator: stale resonances");
  const double eps = ex_.eps;
  const double s1 = -(1.0 + eps) / 2.0;
  const double inf = std::numeric_limits<double>::infinity();
  const FourierField p1z03 = apply_PN(e.Z03, e.N, 1);
  const FourierField z1a = multiply(e.Z1, p1z03);
  const FourierField z1a2 = multiply(z1a, p1z03);
  const std::array<double, zs_count - 1> now = {
      besov_norm(e.Z1, {s1, inf}),
      besov_norm(apply_PN(e.Z, e.N, 2), {s1, inf}),
      e.Z2_blocks ? besov_norm(*e.Z2_blocks, {-1.0 - eps / 24.0, inf})
                  : besov_norm(e.Z2, {-1.0 - eps / 24.0, inf}),
      besov_norm(e.Z22, {-eps / 4.0, inf}),
      besov_norm(e.Z02, {1.0 - eps / 2.0, inf}),
      besov_norm(e.Z03, {0.5 - eps / 4.0, inf}),
      besov_norm(e.Z23, {s1, inf}),
      besov_norm(z1a, {s1, inf}),
      besov_norm(z1a2, {s1, inf}),
  };
  for (std::size_t i = 0; i < now.size(); ++i) sups_[i] = std::max(sups_[i], now[i]);
  t_.push_back(e.t);
  z03_.push_back(e.Z03);
}

std::array<double, zs_count> ZsAccumulator::values() const {
  std::array<double, zs_count> out{};
  std::copy(sups_.begin(), sups_.end(), out.begin());
  // Unweighted quotient over all pairs s < t.
  double m = 0.0;
  for (std::size_t i = 0; i < t_.size(); ++i) {
    for (std::size_t j = i + 1; j < t_.size(); ++j) {
      const double n = lp_norm(inverse_transform(z03_[j] - z03_[i]),
                               std::numeric_limits<double>::infinity());
      m = std::max(m, n / std::pow(t_[j] - t_[i], ex_.gamma));
    }
  }
  out[zs_count - 1] = m;
  return out;
}

std::array<double, zs_count> zs_sups(std::span<const EnhancedState> snapshots,
                                     const ExponentSet& ex) {
  ZsAccumulator acc(ex);
  for (const auto& e : snapshots) acc.add(e);
  return acc.values();
}

// ------------------------------------------------------------------ reports

EstimatorReport estimate_trajectory(const SnapshotSeries& s,
                                    const std::array<double, zs_count>& zs,
                                    const FourierField& Xtilde0, const ExponentSet& ex,
                                    double lambda) {
  require_series(s.t, s.X2.size());
  require_uniform(s.t);
  const double inf = std::numeric_limits<double>::infinity();
  const double s_sup = ex.alpha + 2.0 * ex.gamma;
  const std::array<BesovSpec, 2> lt_specs = {BesovSpec{1.0 - ex.eps, 4.0},
                                             BesovSpec{s_sup, 4.0}};
  const std::array<BesovSpec, 2> geq_specs = {BesovSpec{1.0 + ex.eps, 4.0 / 3.0},
                                              BesovSpec{s_sup, 4.0 / 3.0}};
  std::vector<double> y(s.size()), lt(s.size()), geq(s.size());
  for (std::size_t i = 0; i < s.size(); ++i) {
    const auto a = besov_norms(s.Xlt[i], lt_specs);
    const auto b = besov_norms(s.Xgeq[i], geq_specs);
    y[i] = std::pow(a[0], 3) + b[0];
    lt[i] = std::pow(a[1], 3);
    geq[i] = b[1];
  }
  EstimatorReport r;
  r.N = s.N;
  r.exponents = ex;
  r.X_functional = functional_X(s, ex, lambda);
  r.Y_functional = trapezoid(s.t, y);
  r.Y_q = std::pow(r.Y_functional, ex.q);
  r.holder_seminorm = holder_seminorm(s.t, s.X2, ex.eta, ex.gamma, BesovSpec{ex.alpha, 4.0 / 3.0});
  r.sup_lt = weighted_max(s.t, lt, ex.eta);
  r.sup_geq = weighted_max(s.t, geq, ex.eta);
  const double x0 = besov_norm(apply_PN(Xtilde0, s.N, 2), {-0.5 - ex.eps_tilde, inf});
  r.x0_norm_sq = x0 * x0;
  r.zs = zs;
  return r;
}

std::vector<std::string> report_quantities() {
  std::vector<std::string> q = {"holder_B43_alpha", "X_functional", "Y_q",
                                "sup_lt",           "sup_geq",      "x0_norm_sq"};
  for (const char* n : zs_names) q.emplace_back(n);
  return q;
}

double report_value(const EstimatorReport& r, const std::string& quantity) {
  if (quantity == "holder_B43_alpha") return r.holder_seminorm;
  if (quantity == "X_functional") return r.X_functional;
  if (quantity == "Y_q") return r.Y_q;
  if (quantity == "Y_functional") return r.Y_functional;
  if (quantity == "sup_lt") return r.sup_lt;
  if (quantity == "sup_geq") return r.sup_geq;
  if (quantity == "x0_norm_sq") return r.x0_norm_sq;
  for (std::size_t i = 0; i < zs_count; ++i) {
    if (quantity == zs_names[i]) return r.zs[i];
  }
  throw std::invalid_argument("unknown report quantity: " + quantity);
}

TightnessTable tightness_report(std::span<const EstimatorReport> reports, double factor,
                                std::size_t min_ensemble) {
  std::map<int, std::vector<const EstimatorReport*>> by_n;
  for (const auto& r : reports) by_n[r.N].push_back(&r);
  if (by_n.size() < 2) throw std::invalid_argument("tightness report needs at least 2 cutoffs");
  for (const auto& [n, v] : by_n) {
    if (v.size() < min_ensemble) {
      throw std::invalid_argument("insufficient ensemble for N=" + std::to_string(n) + ": " +
                                  std::to_string(v.size()) + " < " +
                                  std::to_string(min_ensemble));
    }
  }
  TightnessTable table;
  table.factor = factor;
  for (const auto& q : report_quantities()) {
    std::vector<double> means;
    for (const auto& [n, v] : by_n) {
      // two-pass mean and standard error, fixed order
      double sum = 0.0;
      for (const auto* r : v) sum += report_value(*r, q);
      const double mean = sum / static_cast<double>(v.size());
      double ss = 0.0;
      for (const auto* r : v) ss += std::pow(report_value(*r, q) - mean, 2);
      const double var = v.size() > 1 ? ss / static_cast<double>(v.size() - 1) : 0.0;
      table.rows.push_back({n, q, v.size(), mean, std::sqrt(var / static_cast<double>(v.size()))});
      means.push_back(mean);
    }
    bool increasing = true;
    for (std::size_t i = 1; i < means.size(); ++i) increasing &= means[i] > means[i - 1];
    if (increasing && means.back() > factor * means.front()) table.red_flags.push_back(q);
  }
  return table;
}

}  // namespace phi4
