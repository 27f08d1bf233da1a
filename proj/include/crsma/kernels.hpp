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

#pragma once

#include <complex>
#include <cstddef>

namespace crsma::kernels {

using cdouble = std::complex<double>;

// Complex inner-product kernels used on the hot paths of rate evaluation.
// A scalar reference and an AVX2/FMA variant exist; the variant is picked
// once at startup from CPUID. Setting CRSMA_KERNELS=scalar forces the
// reference path.
struct KernelTable {
    const char* name;
    /// sum conj(a[i]) * b[i]
    cdouble (*dotc)(std::size_t n, const cdouble* a, const cdouble* b);
    /// sum a[i] * b[i]
    cdouble (*dotu)(std::size_t n, const cdouble* a, const cdouble* b);
    /// sum |a[i]|^2
    double (*norm2)(std::size_t n, const cdouble* a);
    /// out[i] = conj(a[i]) * b[i]
    void (*mulc)(std::size_t n, const cdouble* a, const cdouble* b, cdouble* out);
};

const KernelTable& scalar_kernels();
/// nullptr when the CPU or the build lacks AVX2/FMA.
const KernelTable* avx2_kernels();
const KernelTable& active();

inline cdouble dotc(std::size_t n, const cdouble* a, const cdouble* b) { return active().dotc(n, a, b); }
inline cdouble dotu(std::size_t n, const cdouble* a, const cdouble* b) { return active().dotu(n, a, b); }
inline double norm2(std::size_t n, const cdouble* a) { return active().norm2(n, a); }
inline void mulc(std::size_t n, const cdouble* a, const cdouble* b, cdouble* out) { active().mulc(n, a, b, out); }

}  // namespace crsma::kernels
