#pragma once

#include <complex>

namespace effcond::detail {

// In-place-safe 2-D DFT of an n x n row-major complex array.
// Forward is unnormalized; inverse divides by n^2.
void fft2(const std::complex<double> *in, std::complex<double> *out, int n);
void ifft2(const std::complex<double> *in, std::complex<double> *out, int n);

// Unit direction of the gradient subspace at Fourier index (a, b).
void mode_direction(int a, int b, int n, double &d1, double &d2);

} // namespace effcond::detail
