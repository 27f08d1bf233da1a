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

#include "crsma/kernels.hpp"

#include <cstdlib>
#include <cstring>

namespace crsma::kernels {

namespace {

cdouble dotc_ref(std::size_t n, const cdouble* a, const cdouble* b) {
    double re = 0.0, im = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        re += a[i].real() * b[i].real() + a[i].imag() * b[i].imag();
        im += a[i].real() * b[i].imag() - a[i].imag() * b[i].real();
    }
    return {re, im};
}

cdouble dotu_ref(std::size_t n, const cdouble* a, const cdouble* b) {
    double re = 0.0, im = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        re += a[i].real() * b[i].real() - a[i].imag() * b[i].imag();
        im += a[i].real() * b[i].imag() + a[i].imag() * b[i].real();
    }
    return {re, im};
}

double norm2_ref(std::size_t n, const cdouble* a) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += a[i].real() * a[i].real() + a[i].imag() * a[i].imag();
    return s;
}

void mulc_ref(std::size_t n, const cdouble* a, const cdouble* b, cdouble* out) {
    for (std::size_t i = 0; i < n; ++i)
        out[i] = {a[i].real() * b[i].real() + a[i].imag() * b[i].imag(),
                  a[i].real() * b[i].imag() - a[i].imag() * b[i].real()};
}

const KernelTable kScalar{"scalar", dotc_ref, dotu_ref, norm2_ref, mulc_ref};

const KernelTable& pick() {
    const char* env = std::getenv("CRSMA_KERNELS");
    if (env && std::strcmp(env, "scalar") == 0) return kScalar;
    if (const KernelTable* t = avx2_kernels()) return *t;
    return kScalar;
}

}  // namespace

const KernelTable& scalar_kernels() { return kScalar; }

const KernelTable& active() {
    static const KernelTable& table = pick();
    return table;
}

}  // namespace crsma::kernels
