#include "fft.hpp"

#include <algorithm>
#include <map>
#include <memory>
#include <mutex>
#include <new>

namespace phi4::detail {

namespace {
// The FFTW planner is not thread-safe; execution is.
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}
}  // namespace

FftPlan::FftPlan(int M) : M_(M) {
  const std::size_t n_real = static_cast<std::size_t>(M) * M * M;
  real_ = fftw_alloc_real(n_real);
  spec_ = fftw_alloc_complex(spectral_count());
  if (real_ == nullptr || spec_ == nullptr) throw std::bad_alloc();
  std::lock_guard<std::mutex> lock(planner_mutex());
  r2c_ = fftw_plan_dft_r2c_3d(M, M, M, real_, spec_, FFTW_ESTIMATE);
  c2r_ = fftw_plan_dft_c2r_3d(M, M, M, spec_, real_, FFTW_ESTIMATE);
}

// One-dimensional pieces of a 3-D transform over the spectral layout
// [(i1 M + i2) h + i3], h = M/2+1, restricted to |k_i| <= K.
struct FftPlan::BandPlans {
  int K = 0;
  fftw_plan axis1_inv = nullptr, axis2_inv = nullptr, axis3_c2r = nullptr;
  fftw_plan axis1_fwd = nullptr, axis2_fwd = nullptr, axis3_r2c = nullptr;

  ~BandPlans() {
    for (fftw_plan p : {axis1_inv, axis2_inv, axis3_c2r, axis1_fwd, axis2_fwd, axis3_r2c}) {
      if (p) fftw_destroy_plan(p);
    }
  }
};

FftPlan::BandPlans& FftPlan::band(int K) {
  auto it = band_.find(K);
  if (it != band_.end()) return *it->second;
  auto b = std::make_unique<BandPlans>();
  b->K = K;
  const int M = M_;
  const int h = M / 2 + 1;
  int n[1] = {M};
  // Lines are executed at offsets of whole rows; fall back to unaligned
  // plans when those offsets change the SIMD alignment.
  const int base = fftw_alignment_of(reinterpret_cast<double*>(spec_));
  const bool same = fftw_alignment_of(reinterpret_cast<double*>(spec_ + h)) == base &&
                    fftw_alignment_of(reinterpret_cast<double*>(spec_ + M * h)) == base;
  const unsigned flags = FFTW_ESTIMATE | (same ? 0u : FFTW_UNALIGNED);
  {
    std::lock_guard<std::mutex> lock(planner_mutex());
    b->axis1_inv = fftw_plan_many_dft(1, n, K + 1, spec_, nullptr, M * h, 1, spec_, nullptr,
                                      M * h, 1, FFTW_BACKWARD, flags);
    b->axis2_inv = fftw_plan_many_dft(1, n, K + 1, spec_, nullptr, h, 1, spec_, nullptr, h,
                                      1, FFTW_BACKWARD, flags);
    b->axis3_c2r = fftw_plan_many_dft_c2r(1, n, M * M, spec_, nullptr, 1, h, real_, nullptr,
                                          1, M, FFTW_ESTIMATE);
    b->axis3_r2c = fftw_plan_many_dft_r2c(1, n, M * M, real_, nullptr, 1, M, spec_, nullptr,
                                          1, h, FFTW_ESTIMATE);
    b->axis2_fwd = fftw_plan_many_dft(1, n, K + 1, spec_, nullptr, h, 1, spec_, nullptr, h,
                                      1, FFTW_FORWARD, flags);
    b->axis1_fwd = fftw_plan_many_dft(1, n, K + 1, spec_, nullptr, M * h, 1, spec_, nullptr,
                                      M * h, 1, FFTW_FORWARD, flags);
  }
  return *band_.emplace(K, std::move(b)).first->second;
}

void FftPlan::inverse_band(int K) { inverse_band(K, real_); }

void FftPlan::forward_band(int K) { forward_band(K, real_); }

void FftPlan::inverse_band(int K, double* samples) {
  BandPlans& b = band(K);
  const int M = M_;
  const std::size_t h = static_cast<std::size_t>(M / 2 + 1);
  for (int k2 = -K; k2 <= K; ++k2) {
    fftw_complex* p = spec_ + static_cast<std::size_t>(k2 < 0 ? k2 + M : k2) * h;
    fftw_execute_dft(b.axis1_inv, p, p);
  }
  for (int i1 = 0; i1 < M; ++i1) {
    fftw_complex* p = spec_ + static_cast<std::size_t>(i1) * M * h;
    fftw_execute_dft(b.axis2_inv, p, p);
  }
  if (fftw_alignment_of(samples) == fftw_alignment_of(real_)) {
    fftw_execute_dft_c2r(b.axis3_c2r, spec_, samples);
  } else {
    fftw_execute_dft_c2r(b.axis3_c2r, spec_, real_);
    std::copy(real_, real_ + static_cast<std::size_t>(M) * M * M, samples);
  }
}

void FftPlan::forward_band(int K, const double* samples) {
  BandPlans& b = band(K);
  const int M = M_;
  const std::size_t h = static_cast<std::size_t>(M / 2 + 1);
  // r2c plans preserve their input.
  double* in = const_cast<double*>(samples);
  if (fftw_alignment_of(in) != fftw_alignment_of(real_)) {
    std::copy(samples, samples + static_cast<std::size_t>(M) * M * M, real_);
    in = real_;
  }
  fftw_execute_dft_r2c(b.axis3_r2c, in, spec_);
  for (int i1 = 0; i1 < M; ++i1) {
    fftw_complex* p = spec_ + static_cast<std::size_t>(i1) * M * h;
    fftw_execute_dft(b.axis2_fwd, p, p);
  }
  for (int k2 = -K; k2 <= K; ++k2) {
    fftw_complex* p = spec_ + static_cast<std::size_t>(k2 < 0 ? k2 + M : k2) * h;
    fftw_execute_dft(b.axis1_fwd, p, p);
  }
}

FftPlan::~FftPlan() {
  std::lock_guard<std::mutex> lock(planner_mutex());
  band_.clear();
  if (r2c_) fftw_destroy_plan(r2c_);
  if (c2r_) fftw_destroy_plan(c2r_);
  fftw_free(real_);
  fftw_free(spec_);
}

std::size_t FftPlan::spectral_count() const {
  return static_cast<std::size_t>(M_) * M_ * (M_ / 2 + 1);
}

std::span<std::complex<double>> FftPlan::spectral() {
  return {reinterpret_cast<std::complex<double>*>(spec_), spectral_count()};
}

void FftPlan::forward() { fftw_execute(r2c_); }
void FftPlan::inverse() { fftw_execute(c2r_); }

FftPlan& plan_for(int M) {
  thread_local std::map<int, std::unique_ptr<FftPlan>> cache;
  auto it = cache.find(M);
  if (it == cache.end()) {
    it = cache.emplace(M, std::make_unique<FftPlan>(M)).first;
  }
  return *it->second;
}

}  // namespace phi4::detail
