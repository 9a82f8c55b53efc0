#pragma once

// Torus (R/2piZ)^3 geometry and the spectral/physical representations of real
// fields. Coefficients are taken against the orthonormal basis
// e_k(x) = (2pi)^{-3/2} exp(i k.x) and stored on the dense cube [-K,K]^3.

#include <cmath>
#include <complex>
#include <cstddef>
#include <new>
#include <span>
#include <vector>

namespace phi4 {

using cplx = std::complex<double>;

inline constexpr double pi = 3.14159265358979323846;
inline constexpr double two_pi = 2.0 * pi;
/// (2pi)^{3/2}, the volume factor between e_0 and the constant function 1.
inline const double torus_sqrt_volume = std::pow(two_pi, 1.5);
inline constexpr double torus_volume = two_pi * two_pi * two_pi;

struct Mode {
  int k1 = 0;
  int k2 = 0;
  int k3 = 0;

  int norm_sq() const { return k1 * k1 + k2 * k2 + k3 * k3; }
  Mode operator-() const { return {-k1, -k2, -k3}; }
  bool operator==(const Mode&) const = default;
};

struct TorusGrid {
  int K = 1;  // retained modes per axis: k in [-K, K]
  int M = 8;  // physical samples per axis
  double h = two_pi / 8;

  int side() const { return 2 * K + 1; }
  std::size_t mode_count() const {
    return static_cast<std::size_t>(side()) * side() * side();
  }
  std::size_t point_count() const {
    return static_cast<std::size_t>(M) * M * M;
  }
  /// M >= 4K+1: pointwise cubes of band-K fields are alias-free on [-K,K]^3.
  bool cubic_safe() const { return M >= 4 * K + 1; }

  bool operator==(const TorusGrid& o) const { return K == o.K && M == o.M; }
};

/// Rejects M < 2K+1 (aliasing certain).
TorusGrid make_grid(int K, int M);

/// Smallest integer >= n whose prime factors are all in {2,3,5,7}.
int fft_friendly_size(int n);

/// Cubic-safe grid with an FFT-friendly M >= 4K+1.
TorusGrid make_simulation_grid(int K);

class FourierField {
 public:
  FourierField() = default;
  explicit FourierField(const TorusGrid& grid);

  const TorusGrid& grid() const { return grid_; }

  std::size_t index(int k1, int k2, int k3) const {
    const int s = grid_.side();
    return (static_cast<std::size_t>(k1 + grid_.K) * s +
            static_cast<std::size_t>(k2 + grid_.K)) * s +
           static_cast<std::size_t>(k3 + grid_.K);
  }
  std::size_t index(const Mode& k) const { return index(k.k1, k.k2, k.k3); }
  Mode mode_at(std::size_t idx) const;
  bool contains(const Mode& k) const;

  cplx operator()(int k1, int k2, int k3) const {
    return coeff_[index(k1, k2, k3)];
  }
  cplx operator()(const Mode& k) const { return coeff_[index(k)]; }

  /// Writes coeff(k) = v and coeff(-k) = conj(v); the zero mode keeps only
  /// the real part.
  void set(const Mode& k, cplx v);
  /// Writes a single coefficient without touching its conjugate partner
  /// (complex-valued fields such as a lone e_k).
  void set_raw(const Mode& k, cplx v) { coeff_[index(k)] = v; }

  std::span<const cplx> coeffs() const { return coeff_; }
  std::span<cplx> coeffs_mut() { return coeff_; }

  bool is_hermitian(double tol = 0.0) const;
  bool all_finite() const;

  FourierField& operator+=(const FourierField& o);
  FourierField& operator-=(const FourierField& o);
  FourierField& operator*=(double s);

  /// Single basis element e_k (complex unless k = 0).
  static FourierField basis(const TorusGrid& grid, const Mode& k);
  /// Real field Re(e_k) = (e_k + e_{-k}) / 2.
  static FourierField real_basis(const TorusGrid& grid, const Mode& k);
  /// Constant function c, i.e. c (2pi)^{3/2} e_0.
  static FourierField constant(const TorusGrid& grid, double c);

 private:
  TorusGrid grid_;
  std::vector<cplx> coeff_;
};

FourierField operator+(FourierField a, const FourierField& b);
FourierField operator-(FourierField a, const FourierField& b);
FourierField operator*(double s, FourierField a);
FourierField operator*(FourierField a, double s);

namespace detail {
/// 64-byte aligned storage so FFT plans can read and write samples in place.
template <class T>
struct AlignedAllocator {
  using value_type = T;
  static constexpr std::align_val_t alignment{64};
  AlignedAllocator() = default;
  template <class U>
  AlignedAllocator(const AlignedAllocator<U>&) noexcept {}
  T* allocate(std::size_t n) {
    return static_cast<T*>(::operator new(n * sizeof(T), alignment));
  }
  void deallocate(T* p, std::size_t) noexcept { ::operator delete(p, alignment); }
  template <class U>
  bool operator==(const AlignedAllocator<U>&) const noexcept {
    return true;
  }
};
}  // namespace detail

class RealField {
 public:
  RealField() = default;
  explicit RealField(const TorusGrid& grid);

  const TorusGrid& grid() const { return grid_; }
  std::size_t index(int j1, int j2, int j3) const {
    return (static_cast<std::size_t>(j1) * grid_.M + j2) * grid_.M + j3;
  }
  double operator()(int j1, int j2, int j3) const {
    return values_[index(j1, j2, j3)];
  }
  double& operator()(int j1, int j2, int j3) {
    return values_[index(j1, j2, j3)];
  }
  std::span<const double> values() const { return values_; }
  std::span<double> values_mut() { return values_; }

 private:
  TorusGrid grid_;
  std::vector<double, detail::AlignedAllocator<double>> values_;
};

/// Physical samples f(x_j), x_j = j h, of a Hermitian-symmetric field.
RealField inverse_transform(const FourierField& f);
/// <f, e_k> by the discrete quadrature h^3 sum_j f(x_j) conj(e_k(x_j)),
/// exact for band-limited f.
FourierField forward_transform(const RealField& f);

/// (h^3 sum_j |f(x_j)|^p)^{1/p}; grid maximum for p = infinity.
double lp_norm(const RealField& f, double p);

/// sum_k f(k) conj(g(k)).
cplx inner_product(const FourierField& f, const FourierField& g);

/// ||f||_{L^2}^2 via Parseval.
double l2_norm_sq(const FourierField& f);

/// Copies the coefficients onto another grid, truncating or zero-padding the
/// mode cube as needed.
FourierField resample(const FourierField& f, const TorusGrid& target);

/// Pseudo-spectral pointwise product f*g projected back onto the mode cube.
FourierField multiply(const FourierField& f, const FourierField& g);

}  // namespace phi4
