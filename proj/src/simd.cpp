#include "dprime/simd.hpp"

#if defined(__x86_64__) || defined(__i386__)
#include <immintrin.h>
#define DPRIME_X86 1
#endif

namespace dprime::simd {

double weighted_diff_norm2_scalar(const double* w, const Complex* x, const Complex* y, Complex cx, Complex cy,
                                  std::size_t n) {
    double s = 0.0;
    for (std::size_t j = 0; j < n; ++j) s += w[j] * std::norm(cx * x[j] - cy * y[j]);
    return s;
}

Complex weighted_dot_scalar(const double* w, const Complex* x, const Complex* y, std::size_t n) {
    Complex s = 0.0;
    for (std::size_t j = 0; j < n; ++j) s += w[j] * (x[j] * y[j]);
    return s;
}

#ifdef DPRIME_X86

namespace {

// Two complex numbers per register, laid out (re0, im0, re1, im1).
__attribute__((target("avx2,fma"))) inline __m256d cmul(__m256d a, __m256d b) {
    const __m256d b_re = _mm256_movedup_pd(b);           // (br, br)
    const __m256d b_im = _mm256_permute_pd(b, 0xF);      // (bi, bi)
    const __m256d a_sw = _mm256_permute_pd(a, 0x5);      // (ai, ar)
    return _mm256_fmaddsub_pd(a, b_re, _mm256_mul_pd(a_sw, b_im));
}

__attribute__((target("avx2,fma"))) double diff_norm2_avx2(const double* w, const Complex* x, const Complex* y,
                                                           Complex cx, Complex cy, std::size_t n) {
    const __m256d vcx = _mm256_setr_pd(cx.real(), cx.imag(), cx.real(), cx.imag());
    const __m256d vcy = _mm256_setr_pd(cy.real(), cy.imag(), cy.real(), cy.imag());
    const double* xd = reinterpret_cast<const double*>(x);
    const double* yd = reinterpret_cast<const double*>(y);
    __m256d acc = _mm256_setzero_pd();
    std::size_t j = 0;
    for (; j + 2 <= n; j += 2) {
        const __m256d d = _mm256_sub_pd(cmul(_mm256_loadu_pd(xd + 2 * j), vcx), cmul(_mm256_loadu_pd(yd + 2 * j), vcy));
        const __m256d ww = _mm256_setr_pd(w[j], w[j], w[j + 1], w[j + 1]);
        acc = _mm256_fmadd_pd(_mm256_mul_pd(ww, d), d, acc);
    }
    alignas(32) double lanes[4];
    _mm256_store_pd(lanes, acc);
    double s = (lanes[0] + lanes[1]) + (lanes[2] + lanes[3]);
    for (; j < n; ++j) s += w[j] * std::norm(cx * x[j] - cy * y[j]);
    return s;
}

__attribute__((target("avx2,fma"))) Complex dot_avx2(const double* w, const Complex* x, const Complex* y,
                                                     std::size_t n) {
    const double* xd = reinterpret_cast<const double*>(x);
    const double* yd = reinterpret_cast<const double*>(y);
    __m256d acc = _mm256_setzero_pd();
    std::size_t j = 0;
    for (; j + 2 <= n; j += 2) {
        const __m256d p = cmul(_mm256_loadu_pd(xd + 2 * j), _mm256_loadu_pd(yd + 2 * j));
        const __m256d ww = _mm256_setr_pd(w[j], w[j], w[j + 1], w[j + 1]);
        acc = _mm256_fmadd_pd(ww, p, acc);
    }
    alignas(32) double lanes[4];
    _mm256_store_pd(lanes, acc);
    Complex s(lanes[0] + lanes[2], lanes[1] + lanes[3]);
    for (; j < n; ++j) s += w[j] * (x[j] * y[j]);
    return s;
}

}  // namespace

bool avx2_available() {
    static const bool ok = __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
    return ok;
}

#else

bool avx2_available() { return false; }

#endif

const char* active_backend() { return avx2_available() ? "avx2" : "scalar"; }

double weighted_diff_norm2(const double* w, const Complex* x, const Complex* y, Complex cx, Complex cy,
                           std::size_t n) {
#ifdef DPRIME_X86
    if (avx2_available()) return diff_norm2_avx2(w, x, y, cx, cy, n);
#endif
    return weighted_diff_norm2_scalar(w, x, y, cx, cy, n);
}

Complex weighted_dot(const double* w, const Complex* x, const Complex* y, std::size_t n) {
#ifdef DPRIME_X86
    if (avx2_available()) return dot_avx2(w, x, y, n);
#endif
    return weighted_dot_scalar(w, x, y, n);
}

}  // namespace dprime::simd
