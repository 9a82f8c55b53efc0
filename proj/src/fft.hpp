#pragma once

// Thin RAII wrapper over FFTW's real 3-D transforms. Plans are created once
// per (thread, M) and reused with plan-owned, fftw_malloc'd buffers, so every
// call runs the same single-threaded algorithm and is bit-reproducible.

#include <fftw3.h>

#include <complex>
#include <cstddef>
#include <map>
#include <memory>
#include <span>

namespace phi4::detail {

class FftPlan {
 public:
  explicit FftPlan(int M);
  ~FftPlan();
  FftPlan(const FftPlan&) = delete;
  FftPlan& operator=(const FftPlan&) = delete;

  int size() const { return M_; }
  /// Last axis is halved: M x M x (M/2+1) complex entries.
  std::size_t spectral_count() const;
  std::span<double> real() { return {real_, static_cast<std::size_t>(M_) * M_ * M_}; }
  std::span<std::complex<double>> spectral();

  void forward();  // real -> spectral, unnormalized exp(-i...)
  void inverse();  // spectral -> real, unnormalized exp(+i...); clobbers spectral

  /// Same transforms when only |k_i| <= K matters: the inverse assumes every
  /// other spectral entry is zero, the forward leaves entries outside the
  /// cube unspecified. Lines that are entirely zero or never read are skipped.
  void forward_band(int K);
  void inverse_band(int K);
  /// Variants reading the samples from / writing them to caller storage of
  /// the same size; fall back to the plan buffer when alignment differs.
  void forward_band(int K, const double* samples);
  void inverse_band(int K, double* samples);

 private:
  int M_;
  double* real_ = nullptr;
  fftw_complex* spec_ = nullptr;
  fftw_plan r2c_ = nullptr;
  fftw_plan c2r_ = nullptr;

  struct BandPlans;
  BandPlans& band(int K);
  std::map<int, std::unique_ptr<BandPlans>> band_;
};

/// Per-thread cached plan for size M.
FftPlan& plan_for(int M);

}  // namespace phi4::detail
