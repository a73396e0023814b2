#pragma once

#include <span>

#include "paprlab/types.hpp"

// Unnormalized DFT pair backed by FFTW:
//   forward: X_k = sum_n x_n exp(-2*pi*i*k*n/M)
//   inverse: x_n = sum_k X_k exp(+2*pi*i*k*n/M)
// Plans are cached per length; execution is thread-safe. In-place calls
// (in.data() == out.data()) are allowed.
namespace paprlab::fft {

void forward(std::span<const cplx> in, std::span<cplx> out);
void inverse(std::span<const cplx> in, std::span<cplx> out);

}  // namespace paprlab::fft
