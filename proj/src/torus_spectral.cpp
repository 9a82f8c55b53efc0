#include "phi4/torus_spectral.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include "fft.hpp"
#include "phi4/kernels.hpp"

namespace phi4 {

TorusGrid make_grid(int K, int M) {
  if (K < 1) throw std::invalid_argument("make_grid: K must be >= 1");
  if (M < 2 * K + 1) {
    throw std::invalid_argument("make_grid: M=" + std::to_string(M) +
                                " < 2K+1=" + std::to_string(2 * K + 1) +
                                " (aliasing)");
  }
  return TorusGrid{K, M, two_pi / M};
}

int fft_friendly_size(int n) {
  for (int m = std::max(n, 1);; ++m) {
    int r = m;
    for (int p : {2, 3, 5, 7}) {
      while (r % p == 0) r /= p;
    }
    if (r == 1) return m;
  }
}

TorusGrid make_simulation_grid(int K) {
  return make_grid(K, fft_friendly_size(4 * K + 1));
}

// ---------------------------------------------------------------- FourierField

FourierField::FourierField(const TorusGrid& grid)
    : grid_(grid), coeff_(grid.mode_count(), cplx{0.0, 0.0}) {}

Mode FourierField::mode_at(std::size_t idx) const {
  const auto s = static_cast<std::size_t>(grid_.side());
  const int k3 = static_cast<int>(idx % s) - grid_.K;
  idx /= s;
  const int k2 = static_cast<int>(idx % s) - grid_.K;
  const int k1 = static_cast<int>(idx / s) - grid_.K;
  return {k1, k2, k3};
}

bool FourierField::contains(const Mode& k) const {
  const int K = grid_.K;
  return std::abs(k.k1) <= K && std::abs(k.k2) <= K && std::abs(k.k3) <= K;
}

void FourierField::set(const Mode& k, cplx v) {
  if (k == Mode{}) {
    coeff_[index(k)] = {v.real(), 0.0};
    return;
  }
  coeff_[index(k)] = v;
  coeff_[index(-k)] = std::conj(v);
}

bool FourierField::is_hermitian(double tol) const {
  for (std::size_t i = 0; i < coeff_.size(); ++i) {
    const Mode k = mode_at(i);
    if (std::abs(coeff_[i] - std::conj(coeff_[index(-k)])) > tol) return false;
  }
  return true;
}

bool FourierField::all_finite() const {
  return std::all_of(coeff_.begin(), coeff_.end(), [](const cplx& c) {
    return std::isfinite(c.real()) && std::isfinite(c.imag());
  });
}

FourierField& FourierField::operator+=(const FourierField& o) {
  if (!(grid_ == o.grid_)) throw std::invalid_argument("field grid mismatch");
  for (std::size_t i = 0; i < coeff_.size(); ++i) coeff_[i] += o.coeff_[i];
  return *this;
}

FourierField& FourierField::operator-=(const FourierField& o) {
  if (!(grid_ == o.grid_)) throw std::invalid_argument("field grid mismatch");
  for (std::size_t i = 0; i < coeff_.size(); ++i) coeff_[i] -= o.coeff_[i];
  return *this;
}

FourierField& FourierField::operator*=(double s) {
  for (auto& c : coeff_) c *= s;
  return *this;
}

FourierField FourierField::basis(const TorusGrid& grid, const Mode& k) {
  FourierField f(grid);
  f.set_raw(k, {1.0, 0.0});
  return f;
}

FourierField FourierField::real_basis(const TorusGrid& grid, const Mode& k) {
  FourierField f(grid);
  if (k == Mode{}) {
    f.set(k, {1.0, 0.0});
  } else {
    f.set(k, {0.5, 0.0});
  }
  return f;
}

FourierField FourierField::constant(const TorusGrid& grid, double c) {
  FourierField f(grid);
  f.set(Mode{}, {c * torus_sqrt_volume, 0.0});
  return f;
}

FourierField operator+(FourierField a, const FourierField& b) {
  a += b;
  return a;
}
FourierField operator-(FourierField a, const FourierField& b) {
  a -= b;
  return a;
}
FourierField operator*(double s, FourierField a) {
  a *= s;
  return a;
}
FourierField operator*(FourierField a, double s) {
  a *= s;
  return a;
}

// ------------------------------------------------------------------- RealField

RealField::RealField(const TorusGrid& grid)
    : grid_(grid), values_(grid.point_count(), 0.0) {}

// ------------------------------------------------------------------ transforms

namespace {
inline int wrap(int k, int M) { return k < 0 ? k + M : k; }
}  // namespace

namespace {
// Largest max(|k1|,|k2|,|k3|) over nonzero coefficients (0 for the zero field).
int occupied_band(const FourierField& f) {
  const int K = f.grid().K;
  const auto c = f.coeffs();
  int band = 0;
  for (std::size_t i = 0; i < c.size(); ++i) {
    if (c[i] == cplx{0.0, 0.0}) continue;
    const Mode k = f.mode_at(i);
    band = std::max({band, std::abs(k.k1), std::abs(k.k2), std::abs(k.k3)});
    if (band == K) break;
  }
  return band;
}
}  // namespace

RealField inverse_transform(const FourierField& f) {
  const TorusGrid& g = f.grid();
  const int K = occupied_band(f);
  const int M = g.M;
  const int half = M / 2 + 1;
  auto& plan = detail::plan_for(M);
  auto spec = plan.spectral();
  std::fill(spec.begin(), spec.end(), cplx{0.0, 0.0});
  const double scale = 1.0 / torus_sqrt_volume;
  for (int k1 = -K; k1 <= K; ++k1) {
    const int i1 = wrap(k1, M);
    for (int k2 = -K; k2 <= K; ++k2) {
      const int i2 = wrap(k2, M);
      const std::size_t row = (static_cast<std::size_t>(i1) * M + i2) * half;
      const std::size_t src = f.index(k1, k2, 0);
      const auto c = f.coeffs();
      for (int k3 = 0; k3 <= K; ++k3) spec[row + k3] = c[src + k3] * scale;
    }
  }
  RealField out(g);
  plan.inverse_band(K, out.values_mut().data());
  return out;
}

FourierField forward_transform(const RealField& f) {
  const TorusGrid& g = f.grid();
  const int K = g.K;
  const int M = g.M;
  const int half = M / 2 + 1;
  auto& plan = detail::plan_for(M);
  plan.forward_band(K, f.values().data());
  auto spec = plan.spectral();
  FourierField out(g);
  const double scale = g.h * g.h * g.h / torus_sqrt_volume;
  for (int k1 = -K; k1 <= K; ++k1) {
    const int i1 = wrap(k1, M);
    const int n1 = wrap(-k1, M);
    for (int k2 = -K; k2 <= K; ++k2) {
      const int i2 = wrap(k2, M);
      const int n2 = wrap(-k2, M);
      const std::size_t row = (static_cast<std::size_t>(i1) * M + i2) * half;
      const std::size_t nrow = (static_cast<std::size_t>(n1) * M + n2) * half;
      for (int k3 = -K; k3 <= K; ++k3) {
        const cplx y = k3 >= 0 ? spec[row + k3] : std::conj(spec[nrow - k3]);
        out.set_raw({k1, k2, k3}, y * scale);
      }
    }
  }
  return out;
}

double lp_norm(const RealField& f, double p) {
  if (!(p >= 1.0)) throw std::invalid_argument("lp_norm: p must be >= 1");
  if (std::isinf(p)) return kernels::max_abs(f.values());
  const double h = f.grid().h;
  const double s = kernels::sum_abs_pow(f.values(), p);
  return std::pow(h * h * h * s, 1.0 / p);
}

cplx inner_product(const FourierField& f, const FourierField& g) {
  if (!(f.grid() == g.grid())) {
    throw std::invalid_argument("inner_product: grid mismatch");
  }
  auto a = f.coeffs();
  auto b = g.coeffs();
  cplx s{0.0, 0.0};
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * std::conj(b[i]);
  return s;
}

double l2_norm_sq(const FourierField& f) {
  double s = 0.0;
  for (const auto& c : f.coeffs()) s += std::norm(c);
  return s;
}

FourierField resample(const FourierField& f, const TorusGrid& target) {
  FourierField out(target);
  const int K = std::min(f.grid().K, target.K);
  for (int k1 = -K; k1 <= K; ++k1)
    for (int k2 = -K; k2 <= K; ++k2)
      for (int k3 = -K; k3 <= K; ++k3) out.set_raw({k1, k2, k3}, f(k1, k2, k3));
  return out;
}

FourierField multiply(const FourierField& f, const FourierField& g) {
  if (!(f.grid() == g.grid())) {
    throw std::invalid_argument("multiply: grid mismatch");
  }
  RealField a = inverse_transform(f);
  const RealField b = inverse_transform(g);
  kernels::multiply(a.values_mut(), a.values(), b.values());
  return forward_transform(a);
}

}  // namespace phi4
