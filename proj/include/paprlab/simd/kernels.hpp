#pragma once

// Data-parallel inner loops used by the DSP chain and the neural layers.
//
// Every kernel has a portable scalar reference and, on x86-64, an AVX2/FMA
// variant. The variant is picked once at startup from CPUID; setting
// PAPRLAB_SIMD=scalar in the environment pins the scalar path. Reductions in
// the vector path use a different summation order, so results agree with
// the reference to round-off, not bit-for-bit.

#include <cstddef>
#include <span>

namespace paprlab::simd {

enum class Isa { scalar, avx2 };

struct Kernels {
  Isa isa;
  const char* name;
  double (*dot)(const double* a, const double* b, std::size_t n);
  // y += alpha * x
  void (*axpy)(double alpha, const double* x, double* y, std::size_t n);
  // x *= alpha
  void (*scale)(double alpha, double* x, std::size_t n);
  double (*sum_squares)(const double* x, std::size_t n);
  // out[i] = re(z_i)^2 + im(z_i)^2 for interleaved complex input
  void (*abs2)(const double* z, double* out, std::size_t n_complex);
};

const Kernels& scalar_kernels();

/// AVX2 table when compiled in and supported by the running CPU, else nullptr.
const Kernels* avx2_kernels();

/// The dispatch target used by the library.
const Kernels& active();

inline double dot(std::span<const double> a, std::span<const double> b) {
  return active().dot(a.data(), b.data(), a.size());
}
inline void axpy(double alpha, std::span<const double> x, std::span<double> y) {
  active().axpy(alpha, x.data(), y.data(), x.size());
}
inline void scale(double alpha, std::span<double> x) { active().scale(alpha, x.data(), x.size()); }
inline double sum_squares(std::span<const double> x) {
  return active().sum_squares(x.data(), x.size());
}

}  // namespace paprlab::simd
