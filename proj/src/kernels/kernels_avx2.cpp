// SPDX-License-Identifier: Apache-2.0
//
// Copyright 2026 The crsma-energy Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------

// Built with -mavx2 -mfma. Nothing here may run before the CPUID check in
// avx2_kernels() has passed.

#include "crsma/kernels.hpp"

#if defined(__x86_64__) && defined(__AVX2__) && defined(__FMA__)
#include <immintrin.h>
#define CRSMA_HAVE_AVX2 1
#endif

namespace crsma::kernels {

#ifdef CRSMA_HAVE_AVX2

namespace {

// Each __m256d holds two complex numbers as (re0, im0, re1, im1).

inline double hsum(__m256d v) {
    const __m128d lo = _mm256_castpd256_pd128(v);
    const __m128d hi = _mm256_extractf128_pd(v, 1);
    const __m128d s = _mm_add_pd(lo, hi);
    return _mm_cvtsd_f64(_mm_add_sd(s, _mm_unpackhi_pd(s, s)));
}

// Sums of the even and odd lanes.
inline void hsum_pairs(__m256d v, double& even, double& odd) {
    const __m128d lo = _mm256_castpd256_pd128(v);
    const __m128d hi = _mm256_extractf128_pd(v, 1);
    const __m128d s = _mm_add_pd(lo, hi);
    even = _mm_cvtsd_f64(s);
    odd = _mm_cvtsd_f64(_mm_unpackhi_pd(s, s));
}

cdouble dotc_avx2(std::size_t n, const cdouble* a, const cdouble* b) {
    const auto* pa = reinterpret_cast<const double*>(a);
    const auto* pb = reinterpret_cast<const double*>(b);
    __m256d acc_re = _mm256_setzero_pd();  // ar*br, ai*bi
    __m256d acc_im = _mm256_setzero_pd();  // ar*bi, ai*br
    std::size_t i = 0;
    for (; i + 2 <= n; i += 2) {
        const __m256d va = _mm256_loadu_pd(pa + 2 * i);
        const __m256d vb = _mm256_loadu_pd(pb + 2 * i);
        const __m256d vbs = _mm256_permute_pd(vb, 0b0101);
        acc_re = _mm256_fmadd_pd(va, vb, acc_re);
        acc_im = _mm256_fmadd_pd(va, vbs, acc_im);
    }
    double re = hsum(acc_re);
    double e = 0.0, o = 0.0;
    hsum_pairs(acc_im, e, o);
    double im = e - o;
    for (; i < n; ++i) {
        re += a[i].real() * b[i].real() + a[i].imag() * b[i].imag();
        im += a[i].real() * b[i].imag() - a[i].imag() * b[i].real();
    }
    return {re, im};
}

cdouble dotu_avx2(std::size_t n, const cdouble* a, const cdouble* b) {
    const auto* pa = reinterpret_cast<const double*>(a);
    const auto* pb = reinterpret_cast<const double*>(b);
    __m256d acc_re = _mm256_setzero_pd();
    __m256d acc_im = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 2 <= n; i += 2) {
        const __m256d va = _mm256_loadu_pd(pa + 2 * i);
        const __m256d vb = _mm256_loadu_pd(pb + 2 * i);
        const __m256d vbs = _mm256_permute_pd(vb, 0b0101);
        acc_re = _mm256_fmadd_pd(va, vb, acc_re);
        acc_im = _mm256_fmadd_pd(va, vbs, acc_im);
    }
    double e = 0.0, o = 0.0;
    hsum_pairs(acc_re, e, o);
    double re = e - o;
    double im = hsum(acc_im);
    for (; i < n; ++i) {
        re += a[i].real() * b[i].real() - a[i].imag() * b[i].imag();
        im += a[i].real() * b[i].imag() + a[i].imag() * b[i].real();
    }
    return {re, im};
}

double norm2_avx2(std::size_t n, const cdouble* a) {
    const auto* pa = reinterpret_cast<const double*>(a);
    __m256d acc = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 2 <= n; i += 2) {
        const __m256d va = _mm256_loadu_pd(pa + 2 * i);
        acc = _mm256_fmadd_pd(va, va, acc);
    }
    double s = hsum(acc);
    for (; i < n; ++i) s += a[i].real() * a[i].real() + a[i].imag() * a[i].imag();
    return s;
}

void mulc_avx2(std::size_t n, const cdouble* a, const cdouble* b, cdouble* out) {
    const auto* pa = reinterpret_cast<const double*>(a);
    const auto* pb = reinterpret_cast<const double*>(b);
    auto* po = reinterpret_cast<double*>(out);
    std::size_t i = 0;
    for (; i + 2 <= n; i += 2) {
        const __m256d va = _mm256_loadu_pd(pa + 2 * i);
        const __m256d vb = _mm256_loadu_pd(pb + 2 * i);
        const __m256d ar = _mm256_movedup_pd(va);            // ar, ar
        const __m256d ai = _mm256_permute_pd(va, 0b1111);    // ai, ai
        const __m256d vbs = _mm256_permute_pd(vb, 0b0101);   // bi, br
        // (ar*br + ai*bi, ar*bi - ai*br)
        const __m256d t = _mm256_mul_pd(ai, vbs);            // ai*bi, ai*br
        const __m256d r = _mm256_fmsubadd_pd(ar, vb, t);     // even: ar*br + t0, odd: ar*bi - t1
        _mm256_storeu_pd(po + 2 * i, r);
    }
    for (; i < n; ++i)
        out[i] = {a[i].real() * b[i].real() + a[i].imag() * b[i].imag(),
                  a[i].real() * b[i].imag() - a[i].imag() * b[i].real()};
}

const KernelTable kAvx2{"avx2", dotc_avx2, dotu_avx2, norm2_avx2, mulc_avx2};

}  // namespace

const KernelTable* avx2_kernels() {
    static const bool ok = __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
    return ok ? &kAvx2 : nullptr;
}

#else

const KernelTable* avx2_kernels() { return nullptr; }

#endif

}  // namespace crsma::kernels
