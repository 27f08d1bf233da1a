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

#include "doctest.h"

#include "crsma/kernels.hpp"

#include <random>
#include <string>
#include <vector>

using namespace crsma::kernels;

namespace {

std::vector<cdouble> random_vec(std::size_t n, std::mt19937_64& rng) {
    std::normal_distribution<double> g;
    std::vector<cdouble> v(n);
    for (auto& x : v) x = {g(rng), g(rng)};
    return v;
}

// Long-double accumulation as the reference.
std::complex<long double> ref_dot(const std::vector<cdouble>& a, const std::vector<cdouble>& b, bool conj_a) {
    std::complex<long double> s = 0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const std::complex<long double> x(a[i].real(), conj_a ? -a[i].imag() : a[i].imag());
        s += x * std::complex<long double>(b[i].real(), b[i].imag());
    }
    return s;
}

double magnitude(const std::vector<cdouble>& a, const std::vector<cdouble>& b) {
    double s = 1.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += std::abs(a[i]) * std::abs(b[i]);
    return s;
}

void check_table(const KernelTable& k) {
    std::mt19937_64 rng(7);
    for (std::size_t n : {0u, 1u, 2u, 3u, 4u, 5u, 7u, 8u, 9u, 16u, 31u, 40u, 67u, 256u}) {
        CAPTURE(n);
        const auto a = random_vec(n, rng);
        const auto b = random_vec(n, rng);
        const double tol = 1e-14 * magnitude(a, b);
        const auto dc = k.dotc(n, a.data(), b.data());
        const auto rc = ref_dot(a, b, true);
        CHECK(std::abs(dc.real() - static_cast<double>(rc.real())) <= tol);
        CHECK(std::abs(dc.imag() - static_cast<double>(rc.imag())) <= tol);
        const auto du = k.dotu(n, a.data(), b.data());
        const auto ru = ref_dot(a, b, false);
        CHECK(std::abs(du.real() - static_cast<double>(ru.real())) <= tol);
        CHECK(std::abs(du.imag() - static_cast<double>(ru.imag())) <= tol);
        const auto nr = ref_dot(a, a, true);
        CHECK(std::abs(k.norm2(n, a.data()) - static_cast<double>(nr.real())) <= tol);
        std::vector<cdouble> out(n);
        k.mulc(n, a.data(), b.data(), out.data());
        for (std::size_t i = 0; i < n; ++i) CHECK(std::abs(out[i] - std::conj(a[i]) * b[i]) <= 1e-15 * (1 + std::abs(a[i]) * std::abs(b[i])));
    }
}

}  // namespace

TEST_CASE("scalar kernels match the long-double reference") { check_table(scalar_kernels()); }

TEST_CASE("avx2 kernels match the long-double reference") {
    const KernelTable* k = avx2_kernels();
    if (!k) {
        MESSAGE("AVX2/FMA unavailable on this host; variant not exercised");
        return;
    }
    check_table(*k);
}

TEST_CASE("avx2 and scalar kernels agree elementwise") {
    const KernelTable* k = avx2_kernels();
    if (!k) return;
    const KernelTable& s = scalar_kernels();
    std::mt19937_64 rng(8);
    for (std::size_t n = 0; n < 70; ++n) {
        const auto a = random_vec(n, rng);
        const auto b = random_vec(n, rng);
        const double tol = 1e-14 * magnitude(a, b);
        CHECK(std::abs(k->dotc(n, a.data(), b.data()) - s.dotc(n, a.data(), b.data())) <= tol);
        CHECK(std::abs(k->dotu(n, a.data(), b.data()) - s.dotu(n, a.data(), b.data())) <= tol);
        CHECK(std::abs(k->norm2(n, a.data()) - s.norm2(n, a.data())) <= tol);
        std::vector<cdouble> o1(n), o2(n);
        k->mulc(n, a.data(), b.data(), o1.data());
        s.mulc(n, a.data(), b.data(), o2.data());
        for (std::size_t i = 0; i < n; ++i) CHECK(std::abs(o1[i] - o2[i]) <= 1e-15 * (1 + std::abs(o2[i])));
    }
}

TEST_CASE("active table is one of the two variants") {
    const std::string name = active().name;
    CHECK((name == scalar_kernels().name || (avx2_kernels() && name == avx2_kernels()->name)));
}
