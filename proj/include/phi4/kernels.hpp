#pragma once

// Data-parallel inner loops shared by every module. Each kernel has an OpenMP
// path and a serial reference path; both produce bit-identical results for any
// thread count because reductions are accumulated over fixed-size chunks and
// the chunk partials are summed in index order.

#include <complex>
#include <cstddef>
#include <span>

namespace phi4::kernels {

enum class Exec { serial, parallel };

inline constexpr std::size_t reduction_chunk = 4096;

/// acc[i] += a[i] * b[i]
void multiply_accumulate(std::span<double> acc, std::span<const double> a,
                         std::span<const double> b, Exec exec = Exec::parallel);

/// acc[i] += a[i]
void add(std::span<double> acc, std::span<const double> a,
         Exec exec = Exec::parallel);

/// out[i] = a[i] * b[i]
void multiply(std::span<double> out, std::span<const double> a,
              std::span<const double> b, Exec exec = Exec::parallel);

/// c[i] *= m[i]
void scale_modes(std::span<std::complex<double>> c, std::span<const double> m,
                 Exec exec = Exec::parallel);

/// sum_i |v[i]|^p, chunked for reproducibility.
double sum_abs_pow(std::span<const double> v, double p,
                   Exec exec = Exec::parallel);

double max_abs(std::span<const double> v, Exec exec = Exec::parallel);

/// Reads PHI4_THREADS and caps the OpenMP worker count accordingly. Returns the
/// active cap (1 when OpenMP is unavailable).
int apply_thread_cap_from_env();

int max_threads();

}  // namespace phi4::kernels
