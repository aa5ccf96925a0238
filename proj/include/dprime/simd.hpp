#pragma once

#include <complex>
#include <cstddef>

namespace dprime::simd {

using Complex = std::complex<double>;

// sum_j w[j] |cx x[j] - cy y[j]|^2
double weighted_diff_norm2(const double* w, const Complex* x, const Complex* y, Complex cx, Complex cy,
                           std::size_t n);
// sum_j w[j] x[j] y[j]
Complex weighted_dot(const double* w, const Complex* x, const Complex* y, std::size_t n);

// Portable reference versions; the dispatching entry points above pick AVX2
// when the CPU has it.
double weighted_diff_norm2_scalar(const double* w, const Complex* x, const Complex* y, Complex cx, Complex cy,
                                  std::size_t n);
Complex weighted_dot_scalar(const double* w, const Complex* x, const Complex* y, std::size_t n);

bool avx2_available();
const char* active_backend();

}  // namespace dprime::simd
