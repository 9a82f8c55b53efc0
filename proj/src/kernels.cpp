#include "phi4/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <string>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace phi4::kernels {

namespace {

// Below this size the fork/join overhead dominates.
constexpr std::ptrdiff_t parallel_threshold = 8192;

bool go_parallel(Exec exec, std::size_t n) {
  return exec == Exec::parallel &&
         static_cast<std::ptrdiff_t>(n) >= parallel_threshold;
}

double chunk_pow(const double* v, std::size_t n, double p) {
  double s = 0.0;
  if (p == 2.0) {
    for (std::size_t i = 0; i < n; ++i) s += v[i] * v[i];
  } else if (p == 4.0) {
    for (std::size_t i = 0; i < n; ++i) {
      const double q = v[i] * v[i];
      s += q * q;
    }
  } else if (p == 1.0) {
    for (std::size_t i = 0; i < n; ++i) s += std::abs(v[i]);
  } else {
    for (std::size_t i = 0; i < n; ++i) s += std::pow(std::abs(v[i]), p);
  }
  return s;
}

}  // namespace

void multiply_accumulate(std::span<double> acc, std::span<const double> a,
                         std::span<const double> b, Exec exec) {
  const auto n = static_cast<std::ptrdiff_t>(acc.size());
  double* out = acc.data();
  const double* pa = a.data();
  const double* pb = b.data();
  if (go_parallel(exec, acc.size())) {
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t i = 0; i < n; ++i) out[i] += pa[i] * pb[i];
  } else {
    for (std::ptrdiff_t i = 0; i < n; ++i) out[i] += pa[i] * pb[i];
  }
}

void add(std::span<double> acc, std::span<const double> a, Exec exec) {
  const auto n = static_cast<std::ptrdiff_t>(acc.size());
  double* out = acc.data();
  const double* pa = a.data();
  if (go_parallel(exec, acc.size())) {
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t i = 0; i < n; ++i) out[i] += pa[i];
  } else {
    for (std::ptrdiff_t i = 0; i < n; ++i) out[i] += pa[i];
  }
}

void multiply(std::span<double> out, std::span<const double> a,
              std::span<const double> b, Exec exec) {
  const auto n = static_cast<std::ptrdiff_t>(out.size());
  double* po = out.data();
  const double* pa = a.data();
  const double* pb = b.data();
  if (go_parallel(exec, out.size())) {
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t i = 0; i < n; ++i) po[i] = pa[i] * pb[i];
  } else {
    for (std::ptrdiff_t i = 0; i < n; ++i) po[i] = pa[i] * pb[i];
  }
}

void scale_modes(std::span<std::complex<double>> c, std::span<const double> m,
                 Exec exec) {
  const auto n = static_cast<std::ptrdiff_t>(c.size());
  std::complex<double>* pc = c.data();
  const double* pm = m.data();
  if (go_parallel(exec, c.size())) {
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t i = 0; i < n; ++i) pc[i] *= pm[i];
  } else {
    for (std::ptrdiff_t i = 0; i < n; ++i) pc[i] *= pm[i];
  }
}

double sum_abs_pow(std::span<const double> v, double p, Exec exec) {
  const std::size_t n = v.size();
  const std::size_t chunks = (n + reduction_chunk - 1) / reduction_chunk;
  std::vector<double> partial(chunks, 0.0);
  const auto nc = static_cast<std::ptrdiff_t>(chunks);
  const double* pv = v.data();
  auto work = [&](std::ptrdiff_t c) {
    const std::size_t lo = static_cast<std::size_t>(c) * reduction_chunk;
    const std::size_t hi = std::min(n, lo + reduction_chunk);
    partial[static_cast<std::size_t>(c)] = chunk_pow(pv + lo, hi - lo, p);
  };
  if (go_parallel(exec, n)) {
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t c = 0; c < nc; ++c) work(c);
  } else {
    for (std::ptrdiff_t c = 0; c < nc; ++c) work(c);
  }
  double s = 0.0;
  for (double x : partial) s += x;
  return s;
}

double max_abs(std::span<const double> v, Exec exec) {
  const auto n = static_cast<std::ptrdiff_t>(v.size());
  const double* pv = v.data();
  double m = 0.0;
  if (go_parallel(exec, v.size())) {
#pragma omp parallel for reduction(max : m) schedule(static)
    for (std::ptrdiff_t i = 0; i < n; ++i) m = std::max(m, std::abs(pv[i]));
  } else {
    for (std::ptrdiff_t i = 0; i < n; ++i) m = std::max(m, std::abs(pv[i]));
  }
  return m;
}

int apply_thread_cap_from_env() {
#ifdef _OPENMP
  if (const char* env = std::getenv("PHI4_THREADS")) {
    try {
      const int cap = std::stoi(env);
      if (cap >= 1) omp_set_num_threads(cap);
    } catch (const std::exception&) {
      // ignore malformed values, keep the OpenMP default
    }
  }
  return omp_get_max_threads();
#else
  return 1;
#endif
}

int max_threads() {
#ifdef _OPENMP
  return omp_get_max_threads();
#else
  return 1;
#endif
}

}  // namespace phi4::kernels
